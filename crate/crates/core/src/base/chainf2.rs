//! Bounded complexes of finite-dimensional GF(2)-vector spaces.
//!
//! Weak equivalences are quasi-isomorphisms, cofibrations are degreewise
//! injections and fibrations are degreewise surjections. Differentials raise
//! degree: `d_n : C_n -> C_{n+1}`, so the disk `D^1` has its generators in
//! degrees 0 and 1 and maps onto the sphere `S^0`.

use std::sync::Arc;

use super::{Cone, Diagram, FactorMode, Factorization, MapClasses, ModelCategory, Square};
use crate::error::{Error, Result};
use crate::gf2::{Matrix, Quotient};

#[derive(Clone, PartialEq, Eq, Hash)]
struct ComplexData {
    lo: i32,
    dims: Vec<usize>,
    /// `diffs[k]` is the differential out of degree `lo + k`; the last one
    /// lands in the zero space above the range.
    diffs: Vec<Matrix>,
}

/// A bounded complex, normalized so that its degree range starts and ends at
/// nonzero spaces. The zero complex has an empty range.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Complex(Arc<ComplexData>);

impl std::fmt::Debug for Complex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Complex(lo={}, dims={:?})", self.0.lo, self.0.dims)
    }
}

impl Complex {
    /// Builds a complex over degrees `lo..lo+dims.len()`; `differentials[k]`
    /// maps degree `lo + k` to degree `lo + k + 1`.
    pub fn new(lo: i32, dims: Vec<usize>, differentials: Vec<Matrix>) -> Result<Self> {
        if differentials.len() + 1 != dims.len().max(1) {
            return Err(Error::MalformedObject(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                differentials.len()
            )));
        }
        for (k, m) in differentials.iter().enumerate() {
            let want = (dims[k + 1], dims[k]);
            if m.shape() != want {
                return Err(Error::MalformedObject(format!(
                    "differential out of degree {} has shape {:?}, expected {want:?}",
                    lo + k as i32,
                    m.shape()
                )));
            }
        }
        let mut diffs = differentials;
        if let Some(&top) = dims.last() {
            diffs.push(Matrix::zeros(0, top));
        }
        let c = Self::from_parts(lo, dims, diffs);
        c.check()?;
        Ok(c)
    }

    pub fn zero() -> Self {
        Complex(Arc::new(ComplexData { lo: 0, dims: Vec::new(), diffs: Vec::new() }))
    }

    /// A single copy of GF(2)^dim in degree `n`.
    pub fn concentrated(n: i32, dim: usize) -> Self {
        Self::from_fn(n, n, |_| dim, |_| Matrix::zeros(0, dim))
    }

    /// The disk `D^n`: one generator in degrees `n-1` and `n` with identity
    /// differential between them.
    pub fn disk(n: i32) -> Self {
        Self::from_fn(n - 1, n, |_| 1, |k| if k == n - 1 { Matrix::identity(1) } else { Matrix::zeros(0, 1) })
    }

    /// Builds from per-degree closures over `[lo, hi]`, then normalizes. The
    /// differential closure is only called inside the range.
    pub(crate) fn from_fn(lo: i32, hi: i32, dim: impl Fn(i32) -> usize, diff: impl Fn(i32) -> Matrix) -> Self {
        if hi < lo {
            return Self::zero();
        }
        let dims: Vec<usize> = (lo..=hi).map(&dim).collect();
        let diffs: Vec<Matrix> = (lo..=hi).map(&diff).collect();
        Self::from_parts(lo, dims, diffs)
    }

    fn from_parts(mut lo: i32, mut dims: Vec<usize>, mut diffs: Vec<Matrix>) -> Self {
        while dims.last() == Some(&0) {
            dims.pop();
            diffs.pop();
        }
        let lead = dims.iter().take_while(|&&d| d == 0).count();
        if lead == dims.len() {
            return Self::zero();
        }
        dims.drain(..lead);
        diffs.drain(..lead);
        lo += lead as i32;
        let top = dims.len() - 1;
        diffs[top] = Matrix::zeros(0, dims[top]);
        Complex(Arc::new(ComplexData { lo, dims, diffs }))
    }

    fn check(&self) -> Result<()> {
        let d = &self.0;
        for (k, m) in d.diffs.iter().enumerate() {
            let n = d.lo + k as i32;
            let want = (self.dim(n + 1), self.dim(n));
            if m.shape() != want {
                return Err(Error::MalformedObject(format!(
                    "differential out of degree {n} has shape {:?}, expected {want:?}",
                    m.shape()
                )));
            }
        }
        if let Some((lo, hi)) = self.range() {
            for n in lo..hi {
                if !self.diff(n + 1).mul(&self.diff(n)).is_zero() {
                    return Err(Error::MalformedObject(format!("differential squared is nonzero out of degree {n}")));
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.0.dims.is_empty()
    }

    /// `(lo, hi)` of the nonzero range.
    pub fn range(&self) -> Option<(i32, i32)> {
        if self.is_zero() {
            None
        } else {
            Some((self.0.lo, self.0.lo + self.0.dims.len() as i32 - 1))
        }
    }

    pub fn dim(&self, n: i32) -> usize {
        let k = n - self.0.lo;
        if k < 0 {
            0
        } else {
            self.0.dims.get(k as usize).copied().unwrap_or(0)
        }
    }

    /// `d_n : C_n -> C_{n+1}`; a zero matrix of the right shape off range.
    pub fn diff(&self, n: i32) -> Matrix {
        let k = n - self.0.lo;
        if k >= 0 && (k as usize) + 1 < self.0.dims.len() {
            return self.0.diffs[k as usize].clone();
        }
        Matrix::zeros(self.dim(n + 1), self.dim(n))
    }

    /// Differentials out of degrees `lo..hi` (the serialized form).
    pub fn differentials(&self) -> Vec<Matrix> {
        let n = self.0.diffs.len().saturating_sub(1);
        self.0.diffs[..n].to_vec()
    }

    pub fn lo(&self) -> i32 {
        self.0.lo
    }

    pub fn dims(&self) -> &[usize] {
        &self.0.dims
    }

    pub fn total_dim(&self) -> usize {
        self.0.dims.iter().sum()
    }

    /// `dim H^n`
    pub fn betti(&self, n: i32) -> usize {
        let cycles = self.dim(n) - self.diff(n).rank();
        cycles - self.diff(n - 1).rank()
    }
}

impl Complex {
    /// `self ⊕ other`, with `self` first in every degree.
    pub fn direct_sum(&self, other: &Complex) -> Complex {
        match union_range(self, other) {
            None => Complex::zero(),
            Some((lo, hi)) => Complex::from_fn(lo, hi, |n| self.dim(n) + other.dim(n), |n| self.diff(n).block_diag(&other.diff(n))),
        }
    }
}

fn union_range(a: &Complex, b: &Complex) -> Option<(i32, i32)> {
    match (a.range(), b.range()) {
        (None, r) | (r, None) => r,
        (Some((l1, h1)), Some((l2, h2))) => Some((l1.min(l2), h1.max(h2))),
    }
}

/// A chain map, stored as one matrix per degree of the union of the source
/// and target ranges.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    lo: i32,
    mats: Vec<Matrix>,
}

impl std::fmt::Debug for ChainMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ChainMap(")?;
        for (k, m) in self.mats.iter().enumerate() {
            write!(f, "{}:{:?} ", self.lo + k as i32, m)?;
        }
        write!(f, ")")
    }
}

impl ChainMap {
    /// Builds from a per-degree closure; checks shapes and the chain condition.
    pub fn new(source: Complex, target: Complex, component: impl Fn(i32) -> Matrix) -> Result<Self> {
        let f = Self::from_fn(source, target, component);
        f.check()?;
        Ok(f)
    }

    pub(crate) fn from_fn(source: Complex, target: Complex, component: impl Fn(i32) -> Matrix) -> Self {
        let (lo, mats) = match union_range(&source, &target) {
            None => (0, Vec::new()),
            Some((lo, hi)) => (lo, (lo..=hi).map(component).collect()),
        };
        ChainMap { source, target, lo, mats }
    }

    pub fn zero(source: Complex, target: Complex) -> Self {
        let s = source.clone();
        let t = target.clone();
        Self::from_fn(source, target, |n| Matrix::zeros(t.dim(n), s.dim(n)))
    }

    fn check(&self) -> Result<()> {
        for (k, m) in self.mats.iter().enumerate() {
            let n = self.lo + k as i32;
            let want = (self.target.dim(n), self.source.dim(n));
            if m.shape() != want {
                return Err(Error::MalformedMap(format!(
                    "component in degree {n} has shape {:?}, expected {want:?}",
                    m.shape()
                )));
            }
        }
        for n in self.degrees() {
            let lhs = self.target.diff(n).mul(&self.at(n));
            let rhs = self.at(n + 1).mul(&self.source.diff(n));
            if lhs != rhs {
                return Err(Error::MalformedMap(format!("does not commute with the differential out of degree {n}")));
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    /// Component in degree `n`; zero off range.
    pub fn at(&self, n: i32) -> Matrix {
        let k = n - self.lo;
        if k >= 0 {
            if let Some(m) = self.mats.get(k as usize) {
                return m.clone();
            }
        }
        Matrix::zeros(self.target.dim(n), self.source.dim(n))
    }

    fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        match union_range(&self.source, &self.target) {
            Some((lo, hi)) => lo..=hi,
            #[allow(clippy::reversed_empty_ranges)]
            None => 0..=-1,
        }
    }
}

/// The instance of complexes over GF(2).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChainF2;

/// Per-degree layout of a direct sum of complexes.
struct SumLayout {
    offsets: Vec<usize>,
    total: usize,
}

fn layout(objs: &[&Complex], n: i32) -> SumLayout {
    let mut offsets = Vec::with_capacity(objs.len());
    let mut total = 0;
    for x in objs {
        offsets.push(total);
        total += x.dim(n);
    }
    SumLayout { offsets, total }
}

fn range_of(objs: &[&Complex]) -> Option<(i32, i32)> {
    objs.iter().filter_map(|x| x.range()).fold(None, |acc, (l, h)| match acc {
        None => Some((l, h)),
        Some((a, b)) => Some((a.min(l), b.max(h))),
    })
}

/// Direct-sum differential out of degree `n`.
fn sum_diff(objs: &[&Complex], n: i32) -> Matrix {
    let src = layout(objs, n);
    let dst = layout(objs, n + 1);
    let mut m = Matrix::zeros(dst.total, src.total);
    for (i, x) in objs.iter().enumerate() {
        m.paste(dst.offsets[i], src.offsets[i], &x.diff(n));
    }
    m
}

/// A contraction of an acyclic complex supported in `[lo, hi]`: maps
/// `s_n : K_n -> K_{n-1}` with `d s + s d = id`, returned for `n` in `lo..=hi`.
fn contraction(lo: i32, hi: i32, dim: &dyn Fn(i32) -> usize, diff: &dyn Fn(i32) -> Matrix) -> Result<Vec<Matrix>> {
    // Split each degree as cycles plus a complement C_n; the differential
    // carries C_{n-1} isomorphically onto the cycles of degree n.
    let mut cycles = Vec::new();
    let mut complement = Vec::new();
    for n in lo - 1..=hi {
        let z = diff(n).kernel();
        complement.push(z.complement_of_image());
        cycles.push(z);
    }
    let at = |v: &Vec<Matrix>, n: i32| v[(n - (lo - 1)) as usize].clone();
    let mut out = Vec::new();
    for n in lo..=hi {
        let z = at(&cycles, n);
        let c = at(&complement, n);
        let basis_inv = z
            .hcat(&c)
            .inverse()
            .ok_or_else(|| Error::internal("cycles and their complement do not form a basis"))?;
        let c_down = at(&complement, n - 1);
        let lift = diff(n - 1)
            .mul(&c_down)
            .solve_matrix(&z)
            .ok_or_else(|| Error::internal("complex is not acyclic"))?;
        let on_basis = c_down.mul(&lift).hcat(&Matrix::zeros(dim(n - 1), c.cols()));
        out.push(on_basis.mul(&basis_inv));
    }
    Ok(out)
}

impl ChainF2 {
    /// Basis of the space of chain maps `x -> y`.
    pub fn hom_basis(&self, x: &Complex, y: &Complex) -> Vec<ChainMap> {
        let Some((lo, hi)) = union_range(x, y) else {
            return Vec::new();
        };
        // Unknowns: entries of f_n for n in lo..=hi, row-major per degree.
        let mut offset = Vec::new();
        let mut total = 0;
        for n in lo..=hi {
            offset.push(total);
            total += y.dim(n) * x.dim(n);
        }
        let var = |n: i32, r: usize, c: usize| offset[(n - lo) as usize] + r * x.dim(n) + c;
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for n in lo - 1..=hi {
            // (d_Y f_n + f_{n+1} d_X)[r, c] = 0 as a map X_n -> Y_{n+1}.
            let dy = y.diff(n);
            let dx = x.diff(n);
            for r in 0..y.dim(n + 1) {
                for c in 0..x.dim(n) {
                    let mut row = Vec::new();
                    for k in 0..y.dim(n) {
                        if dy.get(r, k) {
                            row.push(var(n, k, c));
                        }
                    }
                    for k in 0..x.dim(n + 1) {
                        if dx.get(k, c) {
                            row.push(var(n + 1, r, k));
                        }
                    }
                    rows.push(row);
                }
            }
        }
        let mut system = Matrix::zeros(rows.len(), total);
        for (i, row) in rows.iter().enumerate() {
            for &j in row {
                system.set(i, j, !system.get(i, j));
            }
        }
        let kernel = system.kernel();
        (0..kernel.cols())
            .map(|k| {
                let v = kernel.column(k);
                ChainMap::from_fn(x.clone(), y.clone(), |n| {
                    let mut m = Matrix::zeros(y.dim(n), x.dim(n));
                    for r in 0..y.dim(n) {
                        for c in 0..x.dim(n) {
                            if v[var(n, r, c)] {
                                m.set(r, c, true);
                            }
                        }
                    }
                    m
                })
            })
            .collect()
    }

    /// Sum of chain maps with a common source and target.
    pub fn add(&self, f: &ChainMap, g: &ChainMap) -> Result<ChainMap> {
        if f.source != g.source || f.target != g.target {
            return Err(Error::NotComposable("sum of maps with different endpoints".into()));
        }
        Ok(ChainMap::from_fn(f.source.clone(), f.target.clone(), |n| f.at(n).add(&g.at(n))))
    }

    fn homology_iso(&self, f: &ChainMap) -> bool {
        let (x, y) = (&f.source, &f.target);
        f.degrees().all(|n| {
            let hx = x.betti(n);
            if hx != y.betti(n) {
                return false;
            }
            // The image of the cycles of X in H^n(Y) must be all of it.
            let zx = x.diff(n).kernel();
            let by = y.diff(n - 1).image();
            let induced = by.hcat(&f.at(n).mul(&zx)).rank() - by.cols();
            induced == hx
        })
    }
}

impl ModelCategory for ChainF2 {
    type Obj = Complex;
    type Map = ChainMap;

    fn tag(&self) -> &'static str {
        "chain-f2"
    }

    fn source<'a>(&self, f: &'a ChainMap) -> &'a Complex {
        &f.source
    }

    fn target<'a>(&self, f: &'a ChainMap) -> &'a Complex {
        &f.target
    }

    fn identity(&self, x: &Complex) -> ChainMap {
        ChainMap::from_fn(x.clone(), x.clone(), |n| Matrix::identity(x.dim(n)))
    }

    fn compose(&self, g: &ChainMap, f: &ChainMap) -> Result<ChainMap> {
        if f.target != g.source {
            return Err(Error::NotComposable(format!("{:?} then {:?}", f.target, g.source)));
        }
        Ok(ChainMap::from_fn(f.source.clone(), g.target.clone(), |n| g.at(n).mul(&f.at(n))))
    }

    fn validate_object(&self, x: &Complex) -> Result<()> {
        x.check()
    }

    fn validate_map(&self, f: &ChainMap) -> Result<()> {
        f.source.check()?;
        f.target.check()?;
        f.check()
    }

    fn classify(&self, f: &ChainMap) -> Result<MapClasses> {
        self.validate_map(f)?;
        let cof = f.degrees().all(|n| f.at(n).is_injective());
        let fib = f.degrees().all(|n| f.at(n).is_surjective());
        Ok(MapClasses { we: self.homology_iso(f), cof, fib })
    }

    fn inverse(&self, f: &ChainMap) -> Option<ChainMap> {
        let degrees = f.degrees();
        let lo = *degrees.start();
        let mut invs = Vec::new();
        for n in degrees {
            invs.push(f.at(n).inverse()?);
        }
        Some(ChainMap::from_fn(f.target.clone(), f.source.clone(), |n| invs[(n - lo) as usize].clone()))
    }

    fn factor(&self, f: &ChainMap, mode: FactorMode) -> Result<Factorization<Self>> {
        self.validate_map(f)?;
        let (x, y) = (f.source.clone(), f.target.clone());
        let Some((lo, hi)) = union_range(&x, &y) else {
            return Ok(Factorization { left: self.identity(&x), right: self.identity(&x), middle: x, mode });
        };
        // Both constructions put X first, so the left map is the inclusion of
        // the first summand.
        let (middle, right) = match mode {
            FactorMode::CofThenAcyclicFib => {
                // Mapping cylinder: M_n = X_n + X_{n+1} + Y_n,
                // d(x, x', y) = (dx + x', dx', dy + f x').
                let dim = |n: i32| x.dim(n) + x.dim(n + 1) + y.dim(n);
                let middle = Complex::from_fn(lo - 1, hi, dim, |n| {
                    let mut d = Matrix::zeros(dim(n + 1), dim(n));
                    let (a, b) = (x.dim(n), x.dim(n + 1));
                    let (a1, b1) = (x.dim(n + 1), x.dim(n + 2));
                    d.paste(0, 0, &x.diff(n));
                    d.paste(0, a, &Matrix::identity(b));
                    d.paste(a1, a, &x.diff(n + 1));
                    d.paste(a1 + b1, a, &f.at(n + 1));
                    d.paste(a1 + b1, a + b, &y.diff(n));
                    d
                });
                let m = middle.clone();
                let right = ChainMap::from_fn(middle.clone(), y.clone(), |n| {
                    let mut r = Matrix::zeros(y.dim(n), m.dim(n));
                    r.paste(0, 0, &f.at(n));
                    r.paste(0, x.dim(n) + x.dim(n + 1), &Matrix::identity(y.dim(n)));
                    r
                });
                (middle, right)
            }
            FactorMode::AcyclicCofThenFib => {
                // Mapping path object: P_n = X_n + Y_n + Y_{n-1},
                // d(x, a, b) = (dx, da, a + db).
                let dim = |n: i32| x.dim(n) + y.dim(n) + y.dim(n - 1);
                let middle = Complex::from_fn(lo, hi + 1, dim, |n| {
                    let mut d = Matrix::zeros(dim(n + 1), dim(n));
                    let (xn, yn) = (x.dim(n), y.dim(n));
                    let (xm, ym) = (x.dim(n + 1), y.dim(n + 1));
                    d.paste(0, 0, &x.diff(n));
                    d.paste(xm, xn, &y.diff(n));
                    d.paste(xm + ym, xn, &Matrix::identity(yn));
                    d.paste(xm + ym, xn + yn, &y.diff(n - 1));
                    d
                });
                let m = middle.clone();
                let right = ChainMap::from_fn(middle.clone(), y.clone(), |n| {
                    let mut r = Matrix::zeros(y.dim(n), m.dim(n));
                    r.paste(0, 0, &f.at(n));
                    r.paste(0, x.dim(n), &Matrix::identity(y.dim(n)));
                    r
                });
                (middle, right)
            }
        };
        let m = middle.clone();
        let left = ChainMap::from_fn(x.clone(), middle.clone(), |n| {
            let mut l = Matrix::zeros(m.dim(n), x.dim(n));
            l.paste(0, 0, &Matrix::identity(x.dim(n)));
            l
        });
        Ok(Factorization { left, right, middle, mode })
    }

    fn solve_lift(&self, sq: &Square<Self>) -> Result<Option<ChainMap>> {
        for m in [&sq.left, &sq.right, &sq.top, &sq.bottom] {
            self.validate_map(m)?;
        }
        if sq.top.source != sq.left.source
            || sq.top.target != sq.right.source
            || sq.bottom.source != sq.left.target
            || sq.bottom.target != sq.right.target
        {
            return Err(Error::NotComposable("lifting square endpoints do not match".into()));
        }
        if !self.square_commutes(sq)? {
            return Err(Error::NonCommuting("lifting square".into()));
        }
        let ci = self.classify(&sq.left)?;
        let cp = self.classify(&sq.right)?;
        let acyclic_right = ci.cof && cp.fib && cp.we;
        let acyclic_left = ci.cof && ci.we && cp.fib;
        if !acyclic_right && !acyclic_left {
            return Ok(None);
        }
        let (i, p, top, bottom) = (&sq.left, &sq.right, &sq.top, &sq.bottom);
        let (b, x) = (i.target.clone(), p.source.clone());
        let Some((lo, hi)) = range_of(&[&b, &x, &i.source, &p.target]) else {
            return Ok(Some(ChainMap::zero(b, x)));
        };
        let (ext_lo, ext_hi) = (lo - 1, hi + 1);
        let slot = |n: i32| (n - ext_lo) as usize;
        // A degreewise solution of h0 i = top and p h0 = bottom, built from
        // a left inverse of i and a right inverse of p.
        let mut h0 = Vec::new();
        for n in ext_lo..=ext_hi {
            let inj = i.at(n);
            let l = inj.left_inverse().ok_or_else(|| Error::internal("cofibration not injective"))?;
            let s = p.at(n).right_inverse().ok_or_else(|| Error::internal("fibration not surjective"))?;
            let off_image = Matrix::identity(b.dim(n)).add(&inj.mul(&l));
            h0.push(top.at(n).mul(&l).add(&s.mul(&bottom.at(n)).mul(&off_image)));
        }
        let h0_at = |n: i32| -> Matrix {
            if n < ext_lo || n > ext_hi {
                Matrix::zeros(x.dim(n), b.dim(n))
            } else {
                h0[slot(n)].clone()
            }
        };
        // Failure of h0 to be a chain map, as maps B_n -> X_{n+1}. It lands in
        // ker p and vanishes on the image of i.
        let defect = |n: i32| x.diff(n).mul(&h0_at(n)).add(&h0_at(n + 1).mul(&b.diff(n)));
        let correction: Vec<Matrix> = if acyclic_right {
            let kb: Vec<Matrix> = (ext_lo..=ext_hi).map(|n| p.at(n).kernel()).collect();
            let kb_at = |n: i32| kb[slot(n)].clone();
            let kdim = |n: i32| if n < ext_lo || n > ext_hi { 0 } else { kb[slot(n)].cols() };
            let kdiff = |n: i32| -> Matrix {
                if n < ext_lo || n >= ext_hi {
                    return Matrix::zeros(kdim(n + 1), kdim(n));
                }
                let image = x.diff(n).mul(&kb_at(n));
                kb_at(n + 1).solve_matrix(&image).expect("the fibre is a subcomplex")
            };
            let sigma = contraction(lo, hi + 1, &kdim, &kdiff)?;
            (lo..=hi)
                .map(|n| {
                    // c_n = sigma_{n+1} delta_n, with delta_n in fibre coordinates.
                    let coords = kb_at(n + 1)
                        .solve_matrix(&defect(n))
                        .ok_or_else(|| Error::internal("defect does not land in the fibre"))?;
                    Ok(kb_at(n).mul(&sigma[(n + 1 - lo) as usize]).mul(&coords))
                })
                .collect::<Result<_>>()?
        } else {
            let quotients: Vec<Quotient> = (ext_lo..=ext_hi).map(|n| Quotient::new(&i.at(n).image())).collect();
            let q_at = |n: i32| &quotients[slot(n)];
            let qdim = |n: i32| if n < ext_lo || n > ext_hi { 0 } else { quotients[slot(n)].dim() };
            let qdiff = |n: i32| -> Matrix {
                if n < ext_lo || n >= ext_hi {
                    return Matrix::zeros(qdim(n + 1), qdim(n));
                }
                q_at(n + 1).projection.mul(&b.diff(n)).mul(&q_at(n).section)
            };
            let tau = contraction(lo, hi, &qdim, &qdiff)?;
            (lo..=hi)
                .map(|n| {
                    // c_n = delta_{n-1} section tau_n projection.
                    let delta_bar = defect(n - 1).mul(&q_at(n - 1).section);
                    Ok(delta_bar.mul(&tau[(n - lo) as usize]).mul(&q_at(n).projection))
                })
                .collect::<Result<_>>()?
        };
        let h = ChainMap::from_fn(b.clone(), x.clone(), |n| {
            if n < lo || n > hi {
                Matrix::zeros(x.dim(n), b.dim(n))
            } else {
                h0_at(n).add(&correction[(n - lo) as usize])
            }
        });
        self.validate_map(&h).map_err(|e| Error::internal(format!("lift is not a chain map: {e}")))?;
        if self.compose(&h, i)? != *top || self.compose(p, &h)? != *bottom {
            return Err(Error::internal("lift does not fill the square"));
        }
        Ok(Some(h))
    }

    fn limit(&self, d: &Diagram<Self>) -> Result<Cone<Self>> {
        d.validate(self)?;
        if d.objects.len() == 1 && d.arrows.is_empty() {
            let x = d.objects[0].clone();
            return Ok(Cone { legs: vec![self.identity(&x)], apex: x });
        }
        let objs: Vec<&Complex> = d.objects.iter().collect();
        let Some((lo, hi)) = range_of(&objs) else {
            let apex = Complex::zero();
            let legs = objs.iter().map(|x| ChainMap::zero(apex.clone(), (*x).clone())).collect();
            return Ok(Cone { apex, legs });
        };
        // L_n = kernel of (x_k) -> (g x_from + x_to) over all arrows.
        let mut kernels = Vec::new();
        for n in lo..=hi + 1 {
            let src = layout(&objs, n);
            let rows: usize = d.arrows.iter().map(|a| d.objects[a.to].dim(n)).sum();
            let mut c = Matrix::zeros(rows, src.total);
            let mut r0 = 0;
            for a in &d.arrows {
                let t = d.objects[a.to].dim(n);
                c.paste(r0, src.offsets[a.from], &a.map.at(n));
                let block = c.submatrix(r0, t, src.offsets[a.to], t).add(&Matrix::identity(t));
                c.paste(r0, src.offsets[a.to], &block);
                r0 += t;
            }
            kernels.push(c.kernel());
        }
        let k_at = |n: i32| -> Matrix {
            if n < lo || n > hi + 1 {
                Matrix::zeros(layout(&objs, n).total, 0)
            } else {
                kernels[(n - lo) as usize].clone()
            }
        };
        let apex = Complex::from_fn(lo, hi, |n| k_at(n).cols(), |n| {
            let image = sum_diff(&objs, n).mul(&k_at(n));
            k_at(n + 1).solve_matrix(&image).expect("the limit is a subcomplex of the product")
        });
        let legs = (0..objs.len())
            .map(|i| {
                ChainMap::from_fn(apex.clone(), objs[i].clone(), |n| {
                    let off = layout(&objs, n).offsets[i];
                    k_at(n).submatrix(off, objs[i].dim(n), 0, apex.dim(n))
                })
            })
            .collect();
        Ok(Cone { apex, legs })
    }

    fn colimit(&self, d: &Diagram<Self>) -> Result<Cone<Self>> {
        d.validate(self)?;
        if d.objects.len() == 1 && d.arrows.is_empty() {
            let x = d.objects[0].clone();
            return Ok(Cone { legs: vec![self.identity(&x)], apex: x });
        }
        let objs: Vec<&Complex> = d.objects.iter().collect();
        let Some((lo, hi)) = range_of(&objs) else {
            let apex = Complex::zero();
            let legs = objs.iter().map(|x| ChainMap::zero((*x).clone(), apex.clone())).collect();
            return Ok(Cone { apex, legs });
        };
        // Q_n = sum modulo the span of x_from + g x_from over all arrows.
        let mut quotients = Vec::new();
        for n in lo..=hi {
            let dst = layout(&objs, n);
            let cols: usize = d.arrows.iter().map(|a| d.objects[a.from].dim(n)).sum();
            let mut rel = Matrix::zeros(dst.total, cols);
            let mut c0 = 0;
            for a in &d.arrows {
                let s = d.objects[a.from].dim(n);
                rel.paste(dst.offsets[a.to], c0, &a.map.at(n));
                let block = rel.submatrix(dst.offsets[a.from], s, c0, s).add(&Matrix::identity(s));
                rel.paste(dst.offsets[a.from], c0, &block);
                c0 += s;
            }
            quotients.push(Quotient::new(&rel));
        }
        let q_at = |n: i32| -> Option<&Quotient> {
            if n < lo || n > hi {
                None
            } else {
                Some(&quotients[(n - lo) as usize])
            }
        };
        let apex = Complex::from_fn(lo, hi, |n| q_at(n).map_or(0, Quotient::dim), |n| {
            let here = q_at(n).expect("in range");
            match q_at(n + 1) {
                Some(up) => up.projection.mul(&sum_diff(&objs, n)).mul(&here.section),
                None => Matrix::zeros(0, here.dim()),
            }
        });
        let legs = (0..objs.len())
            .map(|i| {
                ChainMap::from_fn(objs[i].clone(), apex.clone(), |n| match q_at(n) {
                    Some(q) => {
                        let off = layout(&objs, n).offsets[i];
                        q.projection.submatrix(0, q.dim(), off, objs[i].dim(n))
                    }
                    None => Matrix::zeros(apex.dim(n), objs[i].dim(n)),
                })
            })
            .collect();
        Ok(Cone { apex, legs })
    }

    fn limit_factor(&self, limit: &Cone<Self>, apex: &Complex, legs: &[ChainMap]) -> Result<ChainMap> {
        if legs.len() != limit.legs.len() {
            return Err(Error::MalformedDiagram("cone has the wrong number of legs".into()));
        }
        let degrees = range_of(&[apex, &limit.apex]);
        let mut mats = Vec::new();
        if let Some((lo, hi)) = degrees {
            for n in lo..=hi {
                let rows: usize = limit.legs.iter().map(|l| l.target.dim(n)).sum();
                let stack = |ls: &[ChainMap], cols: usize| {
                    let mut m = Matrix::zeros(rows, cols);
                    let mut r0 = 0;
                    for l in ls {
                        m.paste(r0, 0, &l.at(n));
                        r0 += l.target.dim(n);
                    }
                    m
                };
                let kb = stack(&limit.legs, limit.apex.dim(n));
                let want = stack(legs, apex.dim(n));
                let u = kb
                    .solve_matrix(&want)
                    .ok_or_else(|| Error::NonCommuting(format!("cone does not factor through the limit in degree {n}")))?;
                mats.push(u);
            }
        }
        let lo = degrees.map_or(0, |r| r.0);
        let u = ChainMap::from_fn(apex.clone(), limit.apex.clone(), |n| mats[(n - lo) as usize].clone());
        self.validate_map(&u)?;
        Ok(u)
    }

    fn colimit_factor(&self, colimit: &Cone<Self>, apex: &Complex, legs: &[ChainMap]) -> Result<ChainMap> {
        if legs.len() != colimit.legs.len() {
            return Err(Error::MalformedDiagram("cocone has the wrong number of legs".into()));
        }
        let degrees = range_of(&[apex, &colimit.apex]);
        let mut mats = Vec::new();
        if let Some((lo, hi)) = degrees {
            for n in lo..=hi {
                let cols: usize = colimit.legs.iter().map(|l| l.source.dim(n)).sum();
                let row = |ls: &[ChainMap], rows: usize| {
                    let mut m = Matrix::zeros(rows, cols);
                    let mut c0 = 0;
                    for l in ls {
                        m.paste(0, c0, &l.at(n));
                        c0 += l.source.dim(n);
                    }
                    m
                };
                let q = row(&colimit.legs, colimit.apex.dim(n));
                let want = row(legs, apex.dim(n));
                // u q = want, solved as q^T u^T = want^T.
                let ut = q
                    .transpose()
                    .solve_matrix(&want.transpose())
                    .ok_or_else(|| Error::NonCommuting(format!("cocone does not factor in degree {n}")))?;
                mats.push(ut.transpose());
            }
        }
        let lo = degrees.map_or(0, |r| r.0);
        let u = ChainMap::from_fn(colimit.apex.clone(), apex.clone(), |n| mats[(n - lo) as usize].clone());
        self.validate_map(&u)?;
        Ok(u)
    }

    fn jointly_monic(&self, legs: &[ChainMap]) -> bool {
        let Some(first) = legs.first() else { return true };
        first.source.range().is_none_or(|(lo, hi)| {
            (lo..=hi).all(|n| {
                let stacked = legs.iter().skip(1).fold(first.at(n), |acc, l| acc.vcat(&l.at(n)));
                stacked.is_injective()
            })
        })
    }

    fn enumerate_hom(&self, x: &Complex, y: &Complex, cap: usize) -> Option<Vec<ChainMap>> {
        let basis = self.hom_basis(x, y);
        if basis.len() >= usize::BITS as usize - 1 || (1usize << basis.len()) > cap {
            return None;
        }
        let zero = ChainMap::zero(x.clone(), y.clone());
        let mut out = Vec::with_capacity(1 << basis.len());
        for mask in 0usize..(1 << basis.len()) {
            let mut f = zero.clone();
            for (k, b) in basis.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    f = self.add(&f, b).expect("same endpoints");
                }
            }
            out.push(f);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::check_limit;

    fn s0() -> Complex {
        Complex::concentrated(0, 1)
    }

    fn d1() -> Complex {
        Complex::disk(1)
    }

    fn d1_to_s0() -> ChainMap {
        ChainMap::new(d1(), s0(), |n| if n == 0 { Matrix::identity(1) } else { Matrix::zeros(0, 1) }).unwrap()
    }

    #[test]
    fn rejects_nonzero_square() {
        let one = Matrix::identity(1);
        assert!(Complex::new(0, vec![1, 1, 1], vec![one.clone(), one]).is_err());
        assert!(Complex::new(0, vec![1, 2], vec![Matrix::identity(1)]).is_err());
    }

    #[test]
    fn normalizes_zero_ends() {
        let c = Complex::new(-1, vec![0, 1, 0], vec![Matrix::zeros(1, 0), Matrix::zeros(0, 1)]).unwrap();
        assert_eq!(c.range(), Some((0, 0)));
        assert_eq!(c, s0());
    }

    #[test]
    fn disk_is_acyclic() {
        assert_eq!((d1().betti(0), d1().betti(1)), (0, 0));
        assert_eq!(s0().betti(0), 1);
    }

    #[test]
    fn disk_to_sphere_classes() {
        let c = ChainF2.classify(&d1_to_s0()).unwrap();
        assert_eq!(c, MapClasses { we: false, cof: false, fib: true });
        let id = ChainF2.identity(&d1());
        assert_eq!(ChainF2.classify(&id).unwrap(), MapClasses { we: true, cof: true, fib: true });
    }

    #[test]
    fn cylinder_factorization_of_zero_map() {
        let f = ChainMap::zero(Complex::zero(), s0());
        let fac = ChainF2.factor(&f, FactorMode::CofThenAcyclicFib).unwrap();
        assert_eq!(ChainF2.compose(&fac.right, &fac.left).unwrap(), f);
        let c = ChainF2.classify(&fac.right).unwrap();
        assert!(c.we && c.fib);
        assert!(ChainF2.classify(&fac.left).unwrap().cof);
    }

    #[test]
    fn path_factorization_of_zero_map() {
        let f = ChainMap::zero(Complex::zero(), s0());
        let fac = ChainF2.factor(&f, FactorMode::AcyclicCofThenFib).unwrap();
        assert_eq!(ChainF2.compose(&fac.right, &fac.left).unwrap(), f);
        let l = ChainF2.classify(&fac.left).unwrap();
        assert!(l.we && l.cof);
        assert!(ChainF2.classify(&fac.right).unwrap().fib);
    }

    #[test]
    fn factorizations_of_disk_map() {
        let f = d1_to_s0();
        for mode in [FactorMode::CofThenAcyclicFib, FactorMode::AcyclicCofThenFib] {
            let fac = ChainF2.factor(&f, mode).unwrap();
            assert_eq!(ChainF2.compose(&fac.right, &fac.left).unwrap(), f);
            assert!(ChainF2.classify(&fac.left).unwrap().satisfies(mode.left_class()));
            assert!(ChainF2.classify(&fac.right).unwrap().satisfies(mode.right_class()));
        }
    }

    #[test]
    fn lift_disk_identity() {
        let p = d1_to_s0();
        let i = ChainMap::zero(Complex::zero(), d1());
        let top = ChainMap::zero(Complex::zero(), d1());
        let sq = Square { left: i, right: p.clone(), top, bottom: p };
        let h = ChainF2.solve_lift(&sq).unwrap().unwrap();
        assert_eq!(h, ChainF2.identity(&d1()));
    }

    #[test]
    fn lift_against_acyclic_fibration() {
        let f = ChainMap::zero(s0(), Complex::concentrated(1, 1));
        let fac = ChainF2.factor(&f, FactorMode::CofThenAcyclicFib).unwrap();
        let i = ChainMap::zero(Complex::zero(), s0());
        let sq = Square {
            left: i,
            right: fac.right.clone(),
            top: ChainMap::zero(Complex::zero(), fac.middle.clone()),
            bottom: ChainMap::zero(s0(), Complex::concentrated(1, 1)),
        };
        let h = ChainF2.solve_lift(&sq).unwrap().unwrap();
        assert_eq!(ChainF2.compose(&fac.right, &h).unwrap(), sq.bottom);
    }

    #[test]
    fn pullback_of_disk_over_sphere() {
        let d = Diagram::pullback(d1_to_s0(), ChainF2.identity(&s0()), &ChainF2);
        let lim = ChainF2.limit(&d).unwrap();
        assert_eq!(lim.apex.dim(0), 1);
        assert_eq!(lim.apex.dim(1), 1);
        assert!(check_limit(&ChainF2, &d, &lim, &[]).unwrap());
    }

    #[test]
    fn hom_basis_counts() {
        assert_eq!(ChainF2.hom_basis(&d1(), &d1()).len(), 1);
        assert_eq!(ChainF2.hom_basis(&d1(), &s0()).len(), 1);
        assert_eq!(ChainF2.hom_basis(&s0(), &d1()).len(), 0);
        assert_eq!(ChainF2.enumerate_hom(&Complex::zero(), &d1(), 8).unwrap().len(), 1);
    }
}
