//! Iterated commutators `T_b^m f(x) = T((b(x) − b(·))^m f)(x)`.

use super::OperatorRep;
use crate::grid::GridFunction;
use crate::util::binomial;

/// Expands `(b(x) − b(y))^m` binomially: `Σ_k C(m,k) b(x)^{m−k} T((−b)^k f)(x)`,
/// using `m + 1` applications of `T`.
pub fn commutator_apply(t: &OperatorRep, b: &GridFunction, m: u32, f: &GridFunction) -> GridFunction {
    let mut out = vec![0.0; f.len()];
    let mut weighted = f.clone();
    for k in 0..=m {
        let tk = t.apply(&weighted);
        let c = binomial(m, k);
        let e = (m - k) as i32;
        for (x, o) in out.iter_mut().enumerate() {
            *o += c * b.values()[x].powi(e) * tk.values()[x];
        }
        weighted = weighted.zip_map(b, |w, bv| -w * bv);
    }
    GridFunction::new(*f.domain(), out).expect("same domain")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDomain;
    use crate::operators::riesz_potential;
    use crate::rng;
    use proptest::prelude::*;

    #[test]
    fn constant_symbol_and_order_zero() {
        let d = GridDomain::unit(1, 5).unwrap();
        let t = riesz_potential(d, 0.5).unwrap();
        let f = rng::signed(d, &mut rng::stream(4, 0));
        let b = GridFunction::constant(d, 1.7);
        for m in 1..=3 {
            assert!(commutator_apply(&t, &b, m, &f).max_abs() < 1e-10);
        }
        assert_eq!(commutator_apply(&t, &b, 0, &f), t.apply(&f));
    }

    #[test]
    fn second_order_double_sum() {
        let d = GridDomain::unit(1, 5).unwrap();
        let t = riesz_potential(d, 0.5).unwrap();
        let f = rng::signed(d, &mut rng::stream(5, 0));
        let b = rng::signed(d, &mut rng::stream(5, 1));
        let c = commutator_apply(&t, &b, 2, &f);
        for x in 0..d.cell_count() {
            let direct: f64 = (0..d.cell_count())
                .map(|y| t.matrix()[(x, y)] * (b.values()[x] - b.values()[y]).powi(2) * f.values()[y])
                .sum();
            assert!((c.values()[x] - direct).abs() < 1e-11);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn recursion(seed in 0u64..10_000, m in 1u32..=3) {
            let d = GridDomain::unit(1, 5).unwrap();
            let t = riesz_potential(d, 0.5).unwrap();
            let f = rng::signed(d, &mut rng::stream(seed, 0));
            let b = rng::signed(d, &mut rng::stream(seed, 1));
            let lhs = commutator_apply(&t, &b, m, &f);
            let prev = commutator_apply(&t, &b, m - 1, &f);
            let bf = f.zip_map(&b, |x, y| x * y);
            let prev_bf = commutator_apply(&t, &b, m - 1, &bf);
            for x in 0..d.cell_count() {
                let rhs = b.values()[x] * prev.values()[x] - prev_bf.values()[x];
                prop_assert!((lhs.values()[x] - rhs).abs() < 1e-10);
            }
        }
    }
}
