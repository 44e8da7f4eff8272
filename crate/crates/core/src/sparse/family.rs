//! Cube families with disjoint witness sets.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Cube, GridDomain, Lattice};

/// A family of cubes from one lattice, optionally carrying witness cell sets
/// `E_Q ⊂ Q ∩ D` that certify `η`-sparseness.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseFamily {
    pub lattice: Lattice,
    pub cubes: Vec<Cube>,
    pub witness: Option<Vec<Vec<usize>>>,
    pub eta: f64,
}

/// Outcome of [`verify_sparseness`].
#[derive(Clone, Debug, PartialEq)]
pub struct SparsenessCheck {
    pub ok: bool,
    /// `min_Q |E_Q| / |Q ∩ D|` over the family (1 for the empty family).
    pub achieved_eta: f64,
    pub issues: Vec<String>,
    /// The witness that was checked: the stored one, or the greedy one.
    pub witness: Vec<Vec<usize>>,
}

impl SparseFamily {
    pub fn new(lattice: Lattice, cubes: Vec<Cube>, eta: f64) -> Self {
        Self { lattice, cubes, witness: None, eta }
    }

    pub fn with_witness(lattice: Lattice, cubes: Vec<Cube>, witness: Vec<Vec<usize>>, eta: f64) -> Self {
        Self { lattice, cubes, witness: Some(witness), eta }
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// Total measure `Σ |Q|` (geometric).
    pub fn total_measure(&self, domain: &GridDomain) -> f64 {
        self.cubes.iter().map(|q| q.measure(domain)).sum()
    }

    /// One cube per line: `shift level coords… |E_Q cells…`, after an `# eta` header.
    pub fn to_text(&self, domain: &GridDomain) -> String {
        let mut out = format!("# eta {:.17e}\n", self.eta);
        for (k, q) in self.cubes.iter().enumerate() {
            let _ = write!(out, "{} {}", q.lattice, q.level);
            for c in &q.coords[..domain.dim()] {
                let _ = write!(out, " {c}");
            }
            if let Some(w) = &self.witness {
                out.push_str(" |");
                for c in &w[k] {
                    let _ = write!(out, " {c}");
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str, domain: &GridDomain) -> Result<Self> {
        let dim = domain.dim();
        let mut eta = None;
        let mut cubes = Vec::new();
        let mut witness: Vec<Vec<usize>> = Vec::new();
        let mut with_witness = None;
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", no + 1));
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("eta") {
                    eta = Some(it.next().ok_or_else(|| bad("missing η"))?.parse::<f64>().map_err(|_| bad("bad η"))?);
                }
                continue;
            }
            let (head, tail) = match line.split_once('|') {
                Some((h, t)) => (h, Some(t)),
                None => (line, None),
            };
            if *with_witness.get_or_insert(tail.is_some()) != tail.is_some() {
                return Err(bad("witness present on some lines only"));
            }
            let fields: Vec<&str> = head.split_whitespace().collect();
            if fields.len() != 2 + dim {
                return Err(bad("expected lattice, level and coordinates"));
            }
            let lattice: Lattice = fields[0].parse()?;
            let level: u32 = fields[1].parse().map_err(|_| bad("bad level"))?;
            let mut coords = [0i64; 2];
            for i in 0..dim {
                coords[i] = fields[2 + i].parse().map_err(|_| bad("bad coordinate"))?;
            }
            cubes.push(Cube::new(lattice, level, coords));
            if let Some(t) = tail {
                let cells = t
                    .split_whitespace()
                    .map(|s| s.parse::<usize>().map_err(|_| bad("bad cell index")))
                    .collect::<Result<Vec<_>>>()?;
                if cells.iter().any(|&c| c >= domain.cell_count()) {
                    return Err(bad("cell index out of range"));
                }
                witness.push(cells);
            }
        }
        let lattice = cubes.first().map_or(Lattice::Base, |q| q.lattice);
        if cubes.iter().any(|q| q.lattice != lattice) {
            return Err(Error::Parse("family mixes lattices".into()));
        }
        let eta = eta.ok_or_else(|| Error::Parse("missing `# eta` header".into()))?;
        Ok(Self { lattice, cubes, witness: with_witness.unwrap_or(false).then_some(witness), eta })
    }

    pub fn write(&self, path: &Path, domain: &GridDomain) -> Result<()> {
        std::fs::write(path, self.to_text(domain))?;
        Ok(())
    }

    pub fn read(path: &Path, domain: &GridDomain) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?, domain)
    }
}

/// `E_Q = (Q ∩ D) ∖ ∪{family cubes strictly inside Q}`, finest cubes first,
/// never reusing a claimed cell.
fn greedy_witness(family: &SparseFamily, domain: &GridDomain) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..family.cubes.len()).collect();
    order.sort_by_key(|&k| std::cmp::Reverse(family.cubes[k].level));
    let mut claimed = vec![false; domain.cell_count()];
    let mut out = vec![Vec::new(); family.cubes.len()];
    for &k in &order {
        let q = &family.cubes[k];
        let inner: Vec<&Cube> = family
            .cubes
            .iter()
            .filter(|r| r.level > q.level && r.contained_in(q, domain))
            .collect();
        let mut e = Vec::new();
        for c in q.cells(domain).iter() {
            if claimed[c] || inner.iter().any(|r| r.cells(domain).contains(c)) {
                continue;
            }
            e.push(c);
        }
        // a duplicate of an already processed cube finds its cells claimed
        for &c in &e {
            claimed[c] = true;
        }
        out[k] = e;
    }
    out
}

/// Exact witness check: `E_Q ⊂ Q ∩ D`, pairwise disjoint, `|E_Q| ≥ η |Q ∩ D|`.
pub fn verify_sparseness(family: &SparseFamily, domain: &GridDomain) -> SparsenessCheck {
    let mut issues = Vec::new();
    if let Some(q) = family.cubes.iter().find(|q| q.lattice != family.lattice) {
        issues.push(format!("cube {q:?} is not in lattice {}", family.lattice));
    }
    let witness = match &family.witness {
        Some(w) if w.len() == family.cubes.len() => w.clone(),
        Some(w) => {
            issues.push(format!("{} witness sets for {} cubes", w.len(), family.cubes.len()));
            return SparsenessCheck { ok: false, achieved_eta: 0.0, issues, witness: w.clone() };
        }
        None => greedy_witness(family, domain),
    };
    let mut owner: Vec<Option<usize>> = vec![None; domain.cell_count()];
    let mut achieved = 1.0f64;
    for (k, (q, e)) in family.cubes.iter().zip(&witness).enumerate() {
        let cells = q.cells(domain);
        if let Some(&c) = e.iter().find(|&&c| !cells.contains(c)) {
            issues.push(format!("cube {k}: witness cell {c} outside Q ∩ D"));
        }
        for &c in e {
            match owner.get(c).copied().flatten() {
                Some(j) if j != k => issues.push(format!("cells shared by witnesses {j} and {k}")),
                _ => {
                    if c < owner.len() {
                        owner[c] = Some(k);
                    }
                }
            }
        }
        if cells.is_empty() {
            continue;
        }
        let ratio = e.len() as f64 / cells.len() as f64;
        achieved = achieved.min(ratio);
        if ratio < family.eta * (1.0 - 1e-12) {
            issues.push(format!("cube {k}: |E_Q|/|Q ∩ D| = {ratio} < η = {}", family.eta));
        }
    }
    issues.dedup();
    SparsenessCheck { ok: issues.is_empty(), achieved_eta: achieved, issues, witness }
}

/// A family whose witness passed [`verify_sparseness`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerifiedFamily(SparseFamily);

impl VerifiedFamily {
    /// Verifies and stores the checked witness.
    pub fn new(mut family: SparseFamily, domain: &GridDomain) -> Result<Self> {
        let check = verify_sparseness(&family, domain);
        if !check.ok {
            return Err(Error::UnverifiedFamily(check.issues.join("; ")));
        }
        family.witness = Some(check.witness);
        Ok(Self(family))
    }

    pub fn family(&self) -> &SparseFamily {
        &self.0
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.0.cubes
    }

    pub fn into_inner(self) -> SparseFamily {
        self.0
    }
}
