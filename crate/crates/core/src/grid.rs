//! Discretized domains, grid functions and dyadic cube geometry.
//!
//! A domain of depth `J` is the half-open cube `origin + [0, side)^n` cut into
//! `2^{Jn}` cells of side `h = side / 2^J`. Every cube we ever touch has its
//! faces on cell boundaries, so cubes are stored as integer cell spans.
//!
//! Besides the base lattice there are `3^n` tripled lattices. At level `k` the
//! tripled lattice `j` has, along axis `i`, offset `r = ((-1)^k d_i) mod 3`
//! where `d_i` is the `i`-th ternary digit of `j`; its cube `a` covers cells
//! `[(3a + r) 2^{J-k}, (3a + r + 3) 2^{J-k})`. Tripling a base cube lands in
//! exactly one of them.

use std::fmt;

use crate::error::{param, Error, Result};

pub const MAX_DEPTH_1D: u32 = 14;
pub const MAX_DEPTH_2D: u32 = 7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridDomain {
    dim: usize,
    origin: [f64; 2],
    side: f64,
    depth: u32,
}

/// Builds a validated domain.
pub fn make_domain(dim: usize, origin: &[f64], side: f64, depth: u32) -> Result<GridDomain> {
    GridDomain::new(dim, origin, side, depth)
}

impl GridDomain {
    pub fn new(dim: usize, origin: &[f64], side: f64, depth: u32) -> Result<Self> {
        let max_depth = match dim {
            1 => MAX_DEPTH_1D,
            2 => MAX_DEPTH_2D,
            _ => return param(format!("dimension must be 1 or 2, got {dim}")),
        };
        if depth < 1 || depth > max_depth {
            return param(format!("depth {depth} outside 1..={max_depth} for dimension {dim}"));
        }
        if !(side > 0.0 && side.is_finite()) {
            return param(format!("side must be positive and finite, got {side}"));
        }
        if origin.len() != dim || origin.iter().any(|o| !o.is_finite()) {
            return param(format!("origin must have {dim} finite coordinates"));
        }
        let mut o = [0.0; 2];
        o[..dim].copy_from_slice(origin);
        Ok(Self { dim, origin: o, side, depth })
    }

    /// Unit interval or unit square.
    pub fn unit(dim: usize, depth: u32) -> Result<Self> {
        Self::new(dim, &[0.0; 2][..dim.min(2)], 1.0, depth)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    /// Cells along one axis.
    pub fn per_axis(&self) -> usize {
        1 << self.depth
    }

    pub fn cell_count(&self) -> usize {
        self.per_axis().pow(self.dim as u32)
    }

    pub fn cell_size(&self) -> f64 {
        self.side / self.per_axis() as f64
    }

    /// `h^n`.
    pub fn cell_measure(&self) -> f64 {
        self.cell_size().powi(self.dim as i32)
    }

    pub fn measure(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    pub fn cell_index(&self, coords: [usize; 2]) -> usize {
        coords[0] + coords[1] * self.per_axis()
    }

    pub fn cell_coords(&self, idx: usize) -> [usize; 2] {
        let m = self.per_axis();
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx % m, idx / m]
        }
    }

    pub fn cell_center(&self, idx: usize) -> [f64; 2] {
        let c = self.cell_coords(idx);
        let h = self.cell_size();
        let mut x = [0.0; 2];
        for i in 0..self.dim {
            x[i] = self.origin[i] + (c[i] as f64 + 0.5) * h;
        }
        x
    }

    /// Cell containing `point`, if inside the domain.
    pub fn locate(&self, point: &[f64]) -> Option<usize> {
        let h = self.cell_size();
        let mut c = [0usize; 2];
        for i in 0..self.dim {
            let t = ((point[i] - self.origin[i]) / h).floor();
            if t < 0.0 || t >= self.per_axis() as f64 {
                return None;
            }
            c[i] = t as usize;
        }
        Some(self.cell_index(c))
    }

    /// The level-0 cube of the base lattice, equal to the whole domain.
    pub fn base_cube(&self) -> Cube {
        Cube { lattice: Lattice::Base, level: 0, coords: [0, 0] }
    }

    /// All cells.
    pub fn all_cells(&self) -> CellBox {
        CellBox::new(self, [(0, self.per_axis() as i64), (0, self.per_axis() as i64)])
    }

    /// Euclidean diameter of the domain.
    pub fn diameter(&self) -> f64 {
        self.side * (self.dim as f64).sqrt()
    }
}

/// Axis-aligned box of cells `[lo, hi)` per axis, already clipped to the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellBox {
    lo: [usize; 2],
    hi: [usize; 2],
    stride: usize,
}

impl CellBox {
    /// Clips the integer span to the domain. Axis 1 is ignored in 1D.
    pub fn new(domain: &GridDomain, span: [(i64, i64); 2]) -> Self {
        let m = domain.per_axis() as i64;
        let mut lo = [0usize, 0];
        let mut hi = [0usize, 1];
        for i in 0..domain.dim() {
            let a = span[i].0.clamp(0, m);
            let b = span[i].1.clamp(0, m);
            lo[i] = a as usize;
            hi[i] = b.max(a) as usize;
        }
        Self { lo, hi, stride: domain.per_axis() }
    }

    pub fn len(&self) -> usize {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, idx: usize) -> bool {
        let (x, y) = (idx % self.stride, idx / self.stride);
        x >= self.lo[0] && x < self.hi[0] && y >= self.lo[1] && y < self.hi[1]
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let (lo, hi, stride) = (self.lo, self.hi, self.stride);
        (lo[1]..hi[1]).flat_map(move |y| (lo[0]..hi[0]).map(move |x| x + y * stride))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn intersect(&self, other: &CellBox) -> CellBox {
        let mut out = *self;
        for i in 0..2 {
            out.lo[i] = self.lo[i].max(other.lo[i]);
            out.hi[i] = self.hi[i].min(other.hi[i]).max(out.lo[i]);
        }
        out
    }

    /// Per-axis `[lo, hi)` bounds.
    pub fn bounds(&self) -> [(usize, usize); 2] {
        [(self.lo[0], self.hi[0]), (self.lo[1], self.hi[1])]
    }

    pub fn span(&self) -> [(i64, i64); 2] {
        [(self.lo[0] as i64, self.hi[0] as i64), (self.lo[1] as i64, self.hi[1] as i64)]
    }
}

/// Which lattice a cube lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lattice {
    /// The unshifted lattice generated by the domain itself.
    Base,
    /// One of the `3^n` lattices of tripled cubes, indexed by ternary digits.
    Tripled(usize),
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lattice::Base => write!(f, "b"),
            Lattice::Tripled(j) => write!(f, "{j}"),
        }
    }
}

impl std::str::FromStr for Lattice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "b" {
            return Ok(Lattice::Base);
        }
        s.parse::<usize>()
            .map(Lattice::Tripled)
            .map_err(|_| Error::Parse(format!("bad lattice id {s:?}")))
    }
}

impl serde::Serialize for Lattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Lattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = <std::borrow::Cow<'de, str>>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn tripled_offset(j: usize, axis: usize, level: u32) -> i64 {
    let d = ((j / 3usize.pow(axis as u32)) % 3) as i64;
    if level % 2 == 0 {
        d
    } else {
        (3 - d) % 3
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// A half-open cube addressed by lattice, level and integer coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub lattice: Lattice,
    pub level: u32,
    pub coords: [i64; 2],
}

impl Cube {
    pub fn new(lattice: Lattice, level: u32, coords: [i64; 2]) -> Self {
        Self { lattice, level, coords }
    }

    fn unit(&self, domain: &GridDomain) -> i64 {
        1i64 << (domain.depth() - self.level)
    }

    /// Cell span `[lo, hi)` per axis, unclipped.
    pub fn span(&self, domain: &GridDomain) -> [(i64, i64); 2] {
        let u = self.unit(domain);
        let mut s = [(0, 1); 2];
        for (i, si) in s.iter_mut().enumerate().take(domain.dim()) {
            let a = self.coords[i];
            *si = match self.lattice {
                Lattice::Base => (a * u, (a + 1) * u),
                Lattice::Tripled(j) => {
                    let r = tripled_offset(j, i, self.level);
                    ((3 * a + r) * u, (3 * a + r + 3) * u)
                }
            };
        }
        s
    }

    /// Side length in cells.
    pub fn side_cells(&self, domain: &GridDomain) -> i64 {
        let s = self.span(domain)[0];
        s.1 - s.0
    }

    /// `ℓ(Q)`.
    pub fn side(&self, domain: &GridDomain) -> f64 {
        self.side_cells(domain) as f64 * domain.cell_size()
    }

    /// Geometric measure `ℓ(Q)^n`.
    pub fn measure(&self, domain: &GridDomain) -> f64 {
        self.side(domain).powi(domain.dim() as i32)
    }

    /// Cells of `Q ∩ D`.
    pub fn cells(&self, domain: &GridDomain) -> CellBox {
        CellBox::new(domain, self.span(domain))
    }

    /// `|Q ∩ D|`.
    pub fn inner_measure(&self, domain: &GridDomain) -> f64 {
        self.cells(domain).len() as f64 * domain.cell_measure()
    }

    pub fn intersects(&self, domain: &GridDomain) -> bool {
        !self.cells(domain).is_empty()
    }

    /// True when `Q ⊂ D`.
    pub fn inside(&self, domain: &GridDomain) -> bool {
        let m = domain.per_axis() as i64;
        self.span(domain)[..domain.dim()].iter().all(|&(a, b)| a >= 0 && b <= m)
    }

    pub fn center(&self, domain: &GridDomain) -> [f64; 2] {
        let h = domain.cell_size();
        let mut c = [0.0; 2];
        for (i, (a, b)) in self.span(domain).iter().enumerate().take(domain.dim()) {
            c[i] = domain.origin()[i] + 0.5 * (a + b) as f64 * h;
        }
        c
    }

    /// Span of the concentric dilate `3^j Q`.
    pub fn dilated_span(&self, domain: &GridDomain, j: u32) -> [(i64, i64); 2] {
        let mut s = self.span(domain);
        let side = self.side_cells(domain);
        let grow = (3i64.pow(j) - 1) / 2 * side;
        for si in s.iter_mut().take(domain.dim()) {
            *si = (si.0 - grow, si.1 + grow);
        }
        s
    }

    /// Cells of `3^j Q ∩ D`.
    pub fn dilated_cells(&self, domain: &GridDomain, j: u32) -> CellBox {
        CellBox::new(domain, self.dilated_span(domain, j))
    }

    /// `span(self) ⊆ span(other)`.
    pub fn contained_in(&self, other: &Cube, domain: &GridDomain) -> bool {
        let (a, b) = (self.span(domain), other.span(domain));
        (0..domain.dim()).all(|i| a[i].0 >= b[i].0 && a[i].1 <= b[i].1)
    }

    /// Dyadic subdivision into `2^n` children of the same lattice.
    pub fn dyadic_children(&self, domain: &GridDomain) -> Result<Vec<Cube>> {
        if self.level >= domain.depth() {
            return Err(Error::Leaf(self.level));
        }
        let mut first = [0i64; 2];
        for (i, fi) in first.iter_mut().enumerate().take(domain.dim()) {
            let a = self.coords[i];
            *fi = match self.lattice {
                Lattice::Base => 2 * a,
                Lattice::Tripled(j) => {
                    let num = 2 * tripled_offset(j, i, self.level) - tripled_offset(j, i, self.level + 1);
                    debug_assert_eq!(num.rem_euclid(3), 0);
                    2 * a + num / 3
                }
            };
        }
        let level = self.level + 1;
        let mut out = Vec::with_capacity(1 << domain.dim());
        if domain.dim() == 1 {
            for dx in 0..2 {
                out.push(Cube::new(self.lattice, level, [first[0] + dx, 0]));
            }
        } else {
            for dy in 0..2 {
                for dx in 0..2 {
                    out.push(Cube::new(self.lattice, level, [first[0] + dx, first[1] + dy]));
                }
            }
        }
        Ok(out)
    }

    /// The unique parent in the same lattice; `None` at level 0.
    pub fn parent(&self, domain: &GridDomain) -> Option<Cube> {
        if self.level == 0 {
            return None;
        }
        let level = self.level - 1;
        let mut coords = [0i64; 2];
        for (i, ci) in coords.iter_mut().enumerate().take(domain.dim()) {
            let a = self.coords[i];
            *ci = match self.lattice {
                Lattice::Base => a.div_euclid(2),
                Lattice::Tripled(j) => {
                    // child left edge, in child units, is twice the parent's or that plus 3
                    let left = 3 * a + tripled_offset(j, i, self.level);
                    let doubled = if left.rem_euclid(2) == 0 { left } else { left - 3 };
                    (doubled / 2 - tripled_offset(j, i, level)).div_euclid(3)
                }
            };
        }
        Some(Cube::new(self.lattice, level, coords))
    }

    /// `3Q` for a base cube, as a cube of the tripled lattice it belongs to.
    pub fn triple(&self, domain: &GridDomain) -> Result<Cube> {
        if self.lattice != Lattice::Base {
            return param("only base-lattice cubes are tripled into a lattice");
        }
        let mut j = 0usize;
        let mut coords = [0i64; 2];
        for i in 0..domain.dim() {
            let c = self.coords[i] - 1;
            let sign = if self.level % 2 == 0 { 1 } else { -1 };
            let d = (sign * c).rem_euclid(3);
            j += d as usize * 3usize.pow(i as u32);
            let r = c.rem_euclid(3);
            coords[i] = (c - r) / 3;
        }
        let out = Cube::new(Lattice::Tripled(j), self.level, coords);
        debug_assert_eq!(out.span(domain), self.dilated_span(domain, 1));
        Ok(out)
    }
}

/// One dyadic lattice restricted to levels `0..=J` and cubes meeting the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicLattice {
    pub id: Lattice,
}

impl DyadicLattice {
    pub fn base() -> Self {
        Self { id: Lattice::Base }
    }

    /// Level-0 cube containing the whole domain.
    pub fn root(&self, domain: &GridDomain) -> Cube {
        match self.id {
            Lattice::Base => domain.base_cube(),
            Lattice::Tripled(j) => {
                let mut coords = [0i64; 2];
                for (i, c) in coords.iter_mut().enumerate().take(domain.dim()) {
                    *c = if tripled_offset(j, i, 0) == 0 { 0 } else { -1 };
                }
                Cube::new(self.id, 0, coords)
            }
        }
    }

    /// Coordinates of level-`k` cubes meeting the cell box `[lo, hi)` along one axis.
    fn axis_range(&self, domain: &GridDomain, level: u32, axis: usize, lo: i64, hi: i64) -> (i64, i64) {
        let u = 1i64 << (domain.depth() - level);
        match self.id {
            Lattice::Base => (lo.div_euclid(u), (hi - 1).div_euclid(u)),
            Lattice::Tripled(j) => {
                let r = tripled_offset(j, axis, level);
                let first = ceil_div(lo.div_euclid(u) + 1 - r - 3, 3);
                let last = (ceil_div(hi, u) - 1 - r).div_euclid(3);
                (first, last)
            }
        }
    }

    /// Level-`k` cubes of this lattice meeting the given cell span.
    pub fn cubes_meeting(&self, domain: &GridDomain, level: u32, span: [(i64, i64); 2]) -> Vec<Cube> {
        let m = domain.per_axis() as i64;
        let mut ranges = [(0i64, 0i64); 2];
        for i in 0..domain.dim() {
            let (lo, hi) = (span[i].0.max(0), span[i].1.min(m));
            if lo >= hi {
                return Vec::new();
            }
            ranges[i] = self.axis_range(domain, level, i, lo, hi);
        }
        let mut out = Vec::new();
        for y in ranges[1].0..=ranges[1].1 {
            for x in ranges[0].0..=ranges[0].1 {
                out.push(Cube::new(self.id, level, [x, y]));
            }
        }
        out
    }

    pub fn cubes_at_level(&self, domain: &GridDomain, level: u32) -> Vec<Cube> {
        let m = domain.per_axis() as i64;
        self.cubes_meeting(domain, level, [(0, m), (0, m)])
    }

    /// Every cube meeting the domain, coarse to fine.
    pub fn cubes(&self, domain: &GridDomain) -> Vec<Cube> {
        (0..=domain.depth()).flat_map(|k| self.cubes_at_level(domain, k)).collect()
    }

    /// Whether a cube with exactly this span sits in the lattice at `level`.
    pub fn has_span(&self, domain: &GridDomain, level: u32, span: [(i64, i64); 2]) -> bool {
        let u = 1i64 << (domain.depth() - level);
        (0..domain.dim()).all(|i| {
            let (lo, hi) = span[i];
            match self.id {
                Lattice::Base => lo.rem_euclid(u) == 0 && hi - lo == u,
                Lattice::Tripled(j) => {
                    let r = tripled_offset(j, i, level);
                    lo.rem_euclid(u) == 0 && hi - lo == 3 * u && (lo / u - r).rem_euclid(3) == 0
                }
            }
        })
    }
}

/// The `3^n` lattices of tripled cubes.
pub fn three_lattices(domain: &GridDomain) -> Vec<DyadicLattice> {
    (0..3usize.pow(domain.dim() as u32)).map(|j| DyadicLattice { id: Lattice::Tripled(j) }).collect()
}

/// Base lattice plus the tripled lattices: the collection over which suprema
/// "over all cubes containing x" are realized.
pub fn shifted_lattices(domain: &GridDomain) -> Vec<DyadicLattice> {
    let mut v = vec![DyadicLattice::base()];
    v.extend(three_lattices(domain));
    v
}

/// Every cube of the given lattices meeting the domain.
pub fn all_cubes(domain: &GridDomain, lattices: &[DyadicLattice]) -> Vec<Cube> {
    lattices.iter().flat_map(|l| l.cubes(domain)).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ThreeLatticeReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

/// Exhaustive check that each `3Q` sits in exactly one tripled lattice and
/// that each tripled lattice holds exactly one cube of side `3ℓ(Q)` over `Q`.
pub fn verify_three_lattice(domain: &GridDomain) -> ThreeLatticeReport {
    let lattices = three_lattices(domain);
    let mut report = ThreeLatticeReport::default();
    for q in DyadicLattice::base().cubes(domain) {
        report.checked += 1;
        let span3 = q.dilated_span(domain, 1);
        let owners = lattices.iter().filter(|l| l.has_span(domain, q.level, span3)).count();
        if owners != 1 {
            report.violations.push(format!("3Q of {q:?} lies in {owners} lattices"));
        }
        for l in &lattices {
            let covering = l
                .cubes_meeting(domain, q.level, q.span(domain))
                .into_iter()
                .filter(|r| q.contained_in(r, domain))
                .count();
            if covering != 1 {
                report.violations.push(format!("{:?} has {covering} cubes of side 3ℓ(Q) over {q:?}", l.id));
            }
        }
    }
    report
}

/// Cells of the annulus `S_j(Q) = 3^j Q \ 3^{j-1} Q` inside the domain.
pub fn annulus(domain: &GridDomain, q: &Cube, j: u32) -> Vec<usize> {
    if j == 0 {
        return q.cells(domain).to_vec();
    }
    let inner = q.dilated_cells(domain, j - 1);
    q.dilated_cells(domain, j).iter().filter(|&c| !inner.contains(c)).collect()
}

/// Real cell data on a domain, zero outside it.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    domain: GridDomain,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(domain: GridDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.cell_count() {
            return param(format!("expected {} values, got {}", domain.cell_count(), values.len()));
        }
        Ok(Self { domain, values })
    }

    pub fn zeros(domain: GridDomain) -> Self {
        Self { domain, values: vec![0.0; domain.cell_count()] }
    }

    pub fn constant(domain: GridDomain, c: f64) -> Self {
        Self { domain, values: vec![c; domain.cell_count()] }
    }

    /// Samples `f` at cell centers.
    pub fn from_fn(domain: GridDomain, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..domain.cell_count())
            .map(|i| f(&domain.cell_center(i)[..domain.dim()]))
            .collect();
        Self { domain, values }
    }

    /// Indicator of a cell set.
    pub fn indicator(domain: GridDomain, cells: impl IntoIterator<Item = usize>) -> Self {
        let mut g = Self::zeros(domain);
        for c in cells {
            g.values[c] = 1.0;
        }
        g
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { domain: self.domain, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.len(), other.len());
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self { domain: self.domain, values }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// Keeps the values on `cells`, zero elsewhere.
    pub fn restrict(&self, cells: &CellBox) -> Self {
        let mut g = Self::zeros(self.domain);
        for c in cells.iter() {
            g.values[c] = self.values[c];
        }
        g
    }

    /// Zeroes the values on `cells`.
    pub fn remove(&self, cells: &CellBox) -> Self {
        let mut g = self.clone();
        for c in cells.iter() {
            g.values[c] = 0.0;
        }
        g
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.domain.cell_measure()
    }

    /// `‖f‖_{L^p}`, `p = ∞` allowed.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.values, p, None, self.domain.cell_measure())
    }

    /// `‖f‖_{L^p(w)}`.
    pub fn weighted_lp_norm(&self, p: f64, w: &GridFunction) -> f64 {
        lp_norm(&self.values, p, Some(w.values()), self.domain.cell_measure())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn lp_norm(values: &[f64], p: f64, w: Option<&[f64]>, h: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let s: f64 = match w {
        None => values.iter().map(|v| v.abs().powf(p)).sum(),
        Some(w) => values.iter().zip(w).map(|(v, w)| v.abs().powf(p) * w).sum(),
    };
    (s * h).powf(1.0 / p)
}

/// `Σ |v|^r` over cells (or the max for `r = ∞`).
pub(crate) fn power_sum(values: &[f64], cells: impl Iterator<Item = usize>, r: f64) -> f64 {
    if r.is_infinite() {
        cells.fold(0.0, |m, c| m.max(values[c].abs()))
    } else if r == 1.0 {
        cells.map(|c| values[c].abs()).sum()
    } else {
        cells.map(|c| values[c].abs().powf(r)).sum()
    }
}

/// `⟨f⟩_{r,Q}` with geometric `|Q|` and zero extension.
pub fn average(f: &GridFunction, q: &Cube, r: f64) -> f64 {
    let d = f.domain();
    let cells = q.cells(d);
    if cells.is_empty() {
        return 0.0;
    }
    let s = power_sum(f.values(), cells.iter(), r);
    if r.is_infinite() {
        return s;
    }
    (s * d.cell_measure() / q.measure(d)).powf(1.0 / r)
}

/// `(1/|E| Σ_{E} |v|^r h^n)^{1/r}` over a cell set; the measure is that of the set itself.
pub fn set_average(values: &[f64], cells: &[usize], r: f64) -> f64 {
    if cells.is_empty() {
        return 0.0;
    }
    let s = power_sum(values, cells.iter().copied(), r);
    if r.is_infinite() {
        s
    } else {
        (s / cells.len() as f64).powf(1.0 / r)
    }
}

/// Average over `Q ∩ D` normalized by `|Q ∩ D|`. Used for outputs of operators,
/// which are only known inside the domain.
pub fn inner_average(values: &[f64], domain: &GridDomain, q: &Cube, r: f64) -> f64 {
    let cells = q.cells(domain);
    if cells.is_empty() {
        return 0.0;
    }
    let s = power_sum(values, cells.iter(), r);
    if r.is_infinite() {
        s
    } else {
        (s / cells.len() as f64).powf(1.0 / r)
    }
}

/// `⟨f⟩^u_{r,Q} = (u(Q)^{-1} Σ |f|^r u h^n)^{1/r}`.
pub fn weighted_average(f: &GridFunction, q: &Cube, r: f64, u: &GridFunction) -> Result<f64> {
    let d = f.domain();
    let cells = q.cells(d);
    let mass: f64 = cells.iter().map(|c| u.values()[c]).sum();
    if !(mass > 0.0) {
        return Err(Error::DegenerateWeight(format!("u vanishes on {q:?}")));
    }
    if r.is_infinite() {
        return Ok(cells
            .iter()
            .filter(|&c| u.values()[c] > 0.0)
            .fold(0.0, |m, c| m.max(f.values()[c].abs())));
    }
    let s: f64 = cells.iter().map(|c| f.values()[c].abs().powf(r) * u.values()[c]).sum();
    Ok((s / mass).powf(1.0 / r))
}

/// `osc_s(f; Q)`: `s`-mean of `|f(x') − f(x'')|` over pairs of cells of `Q ∩ D`.
pub fn oscillation(f: &GridFunction, q: &Cube, s: f64) -> f64 {
    let cells = q.cells(f.domain()).to_vec();
    set_oscillation(f.values(), &cells, s)
}

pub(crate) fn set_oscillation(values: &[f64], cells: &[usize], s: f64) -> f64 {
    let m = cells.len();
    if m == 0 {
        return 0.0;
    }
    if s.is_infinite() {
        let (lo, hi) = cells.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
            (lo.min(values[c]), hi.max(values[c]))
        });
        return hi - lo;
    }
    if s == 1.0 {
        // Σ_{a,b}|v_a − v_b| = 2 Σ_i (2i − m + 1) v_(i) over the sorted values.
        let mut v: Vec<f64> = cells.iter().map(|&c| values[c]).collect();
        v.sort_by(f64::total_cmp);
        let total: f64 = v.iter().enumerate().map(|(i, x)| (2.0 * i as f64 - m as f64 + 1.0) * x).sum();
        return 2.0 * total / (m * m) as f64;
    }
    let mut total = 0.0;
    for &a in cells {
        for &b in cells {
            total += (values[a] - values[b]).abs().powf(s);
        }
    }
    (total / (m * m) as f64).powf(1.0 / s)
}
