//! Exact-rational finitely supported ℓ₁ vectors, sup-norm-one test
//! functionals, and deterministic sequence generators.
//!
//! Scalars are arbitrary-precision rationals. The only irrational
//! constant, the Walsh scale 1/√2, is carried as a flag on the vector
//! and every mixed comparison goes through squared quantities
//! ([`ScaledValue`]), so certificates stay exact.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::FilterlabError;
use crate::ratio::{format_rational, parse_rational, ScaledValue};
use crate::setalg::{ColumnPartition, EpSet, SetExpr};

// ---------------------------------------------------------------------------
// Vectors
// ---------------------------------------------------------------------------

/// Finitely supported vector with exact rational coordinates; when
/// `scale_sqrt_half` is set the whole vector carries a factor 1/√2.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Vec {
    coords: BTreeMap<u64, BigRational>,
    scale_sqrt_half: bool,
}

impl L1Vec {
    pub fn zero() -> L1Vec {
        L1Vec {
            coords: BTreeMap::new(),
            scale_sqrt_half: false,
        }
    }

    pub fn basis(n: u64) -> L1Vec {
        let mut coords = BTreeMap::new();
        coords.insert(n, BigRational::one());
        L1Vec {
            coords,
            scale_sqrt_half: false,
        }
    }

    pub fn from_coords<I: IntoIterator<Item = (u64, BigRational)>>(coords: I) -> L1Vec {
        let mut map = BTreeMap::new();
        for (k, v) in coords {
            if !v.is_zero() {
                let slot = map.entry(k).or_insert_with(BigRational::zero);
                *slot += v;
                if slot.is_zero() {
                    map.remove(&k);
                }
            }
        }
        L1Vec {
            coords: map,
            scale_sqrt_half: false,
        }
    }

    pub fn with_sqrt_half_scale(mut self, flag: bool) -> L1Vec {
        self.scale_sqrt_half = flag;
        self
    }

    pub fn scale_sqrt_half(&self) -> bool {
        self.scale_sqrt_half
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.coords.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.coords.len()
    }

    pub fn max_support(&self) -> Option<u64> {
        self.coords.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigRational)> + '_ {
        self.coords.iter().map(|(&k, v)| (k, v))
    }

    /// Stored rational coordinate (before the symbolic scale).
    pub fn coord_raw(&self, k: u64) -> BigRational {
        self.coords.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coordinate as an exactly comparable value.
    pub fn coord(&self, k: u64) -> ScaledValue {
        ScaledValue {
            value: self.coord_raw(k),
            sqrt_half: self.scale_sqrt_half,
        }
    }

    /// ℓ₁ norm as an exactly comparable value.
    pub fn norm1(&self) -> ScaledValue {
        let sum = self
            .coords
            .values()
            .fold(BigRational::zero(), |acc, c| acc + c.abs());
        ScaledValue {
            value: sum,
            sqrt_half: self.scale_sqrt_half,
        }
    }

    /// Plain rational norm; `None` for scaled vectors (use
    /// [`L1Vec::norm1_squared`] there).
    pub fn norm1_rational(&self) -> Option<BigRational> {
        if self.scale_sqrt_half && !self.is_zero() {
            None
        } else {
            Some(self.norm1().value)
        }
    }

    pub fn norm1_squared(&self) -> BigRational {
        self.norm1().squared()
    }

    fn same_scale(&self, other: &L1Vec) -> Result<bool, FilterlabError> {
        if self.is_zero() {
            return Ok(other.scale_sqrt_half);
        }
        if other.is_zero() {
            return Ok(self.scale_sqrt_half);
        }
        if self.scale_sqrt_half != other.scale_sqrt_half {
            return Err(FilterlabError::InvalidArgument(
                "cannot mix scaled and unscaled vectors linearly".into(),
            ));
        }
        Ok(self.scale_sqrt_half)
    }

    pub fn add(&self, other: &L1Vec) -> Result<L1Vec, FilterlabError> {
        let scale = self.same_scale(other)?;
        let mut coords = self.coords.clone();
        for (&k, v) in &other.coords {
            let slot = coords.entry(k).or_insert_with(BigRational::zero);
            *slot += v;
            if slot.is_zero() {
                coords.remove(&k);
            }
        }
        Ok(L1Vec {
            coords,
            scale_sqrt_half: scale,
        })
    }

    pub fn sub(&self, other: &L1Vec) -> Result<L1Vec, FilterlabError> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, r: &BigRational) -> L1Vec {
        if r.is_zero() {
            return L1Vec::zero();
        }
        L1Vec {
            coords: self.coords.iter().map(|(&k, v)| (k, v * r)).collect(),
            scale_sqrt_half: self.scale_sqrt_half,
        }
    }

    /// Restriction to the coordinate window `(lo, hi]`.
    pub fn restrict_window(&self, lo: u64, hi: u64) -> L1Vec {
        L1Vec {
            coords: self
                .coords
                .range(lo + 1..=hi)
                .map(|(&k, v)| (k, v.clone()))
                .collect(),
            scale_sqrt_half: self.scale_sqrt_half,
        }
    }

    /// `Σ_{k ≥ m} |coord_k|`, so `tail_mass(v, 1)` is the norm.
    pub fn tail_mass(&self, m: u64) -> ScaledValue {
        let sum = self
            .coords
            .range(m..)
            .fold(BigRational::zero(), |acc, (_, c)| acc + c.abs());
        ScaledValue {
            value: sum,
            sqrt_half: self.scale_sqrt_half,
        }
    }

    /// `Σ_{k ≤ m} |coord_k|`.
    pub fn head_mass(&self, m: u64) -> ScaledValue {
        let sum = self
            .coords
            .range(..=m)
            .fold(BigRational::zero(), |acc, (_, c)| acc + c.abs());
        ScaledValue {
            value: sum,
            sqrt_half: self.scale_sqrt_half,
        }
    }

    /// Exact ℓ₁ distance; both vectors must share scale.
    pub fn distance(&self, other: &L1Vec) -> Result<ScaledValue, FilterlabError> {
        Ok(self.sub(other)?.norm1())
    }

    pub fn to_json(&self) -> Value {
        let coords: serde_json::Map<String, Value> = self
            .coords
            .iter()
            .map(|(k, v)| (k.to_string(), json!(format_rational(v))))
            .collect();
        json!({ "coords": coords, "scaleSqrtHalf": self.scale_sqrt_half })
    }

    pub fn from_json(v: &Value) -> Result<L1Vec, FilterlabError> {
        let coords_obj = v
            .get("coords")
            .and_then(Value::as_object)
            .ok_or_else(|| FilterlabError::Malformed("vector needs a coords object".into()))?;
        let mut coords = BTreeMap::new();
        for (k, rv) in coords_obj {
            let idx: u64 = k
                .parse()
                .map_err(|_| FilterlabError::Malformed(format!("bad coordinate index {k:?}")))?;
            let r = rv
                .as_str()
                .and_then(parse_rational)
                .ok_or_else(|| FilterlabError::Malformed(format!("bad rational at {k:?}")))?;
            if !r.is_zero() {
                coords.insert(idx, r);
            }
        }
        Ok(L1Vec {
            coords,
            scale_sqrt_half: v
                .get("scaleSqrtHalf")
                .and_then(Value::as_bool)
                .unwrap_or(false),
        })
    }
}

// ---------------------------------------------------------------------------
// Test functionals
// ---------------------------------------------------------------------------

/// An element of the dual ball: coordinates bounded by one in absolute
/// value. Values outside the ball are rejected at construction, never
/// clamped.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunctional {
    /// `f(x) = Σ e_n*(x)`.
    Summing,
    /// Eventually periodic coordinate values.
    EpSigns {
        prefix: Vec<BigRational>,
        period: Vec<BigRational>,
    },
    /// Constant value on each listed coordinate window `(lo, hi]`,
    /// zero elsewhere. Windows must be disjoint.
    BlockSigns { blocks: Vec<(u64, u64, BigRational)> },
}

impl TestFunctional {
    pub fn ep_signs(
        prefix: Vec<BigRational>,
        period: Vec<BigRational>,
    ) -> Result<TestFunctional, FilterlabError> {
        if period.is_empty() {
            return Err(FilterlabError::InvalidArgument(
                "period of a sign pattern must be non-empty".into(),
            ));
        }
        for v in prefix.iter().chain(period.iter()) {
            if v.abs() > BigRational::one() {
                return Err(FilterlabError::InvalidArgument(format!(
                    "functional value {} exceeds the dual ball",
                    format_rational(v)
                )));
            }
        }
        Ok(TestFunctional::EpSigns { prefix, period })
    }

    pub fn block_signs(
        mut blocks: Vec<(u64, u64, BigRational)>,
    ) -> Result<TestFunctional, FilterlabError> {
        blocks.sort_by_key(|&(lo, _, _)| lo);
        for w in blocks.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(FilterlabError::InvalidArgument(
                    "block windows overlap".into(),
                ));
            }
        }
        for (lo, hi, v) in &blocks {
            if lo > hi {
                return Err(FilterlabError::InvalidArgument(
                    "block window bounds out of order".into(),
                ));
            }
            if v.abs() > BigRational::one() {
                return Err(FilterlabError::InvalidArgument(format!(
                    "functional value {} exceeds the dual ball",
                    format_rational(v)
                )));
            }
        }
        Ok(TestFunctional::BlockSigns { blocks })
    }

    pub fn value_at(&self, k: u64) -> BigRational {
        match self {
            TestFunctional::Summing => BigRational::one(),
            TestFunctional::EpSigns { prefix, period } => {
                let idx = (k - 1) as usize;
                if idx < prefix.len() {
                    prefix[idx].clone()
                } else {
                    period[(idx - prefix.len()) % period.len()].clone()
                }
            }
            TestFunctional::BlockSigns { blocks } => {
                for (lo, hi, v) in blocks {
                    if k > *lo && k <= *hi {
                        return v.clone();
                    }
                }
                BigRational::zero()
            }
        }
    }

    /// Exact evaluation, summing over the support of `v` only.
    pub fn apply(&self, v: &L1Vec) -> ScaledValue {
        let mut sum = BigRational::zero();
        for (&k, c) in &v.coords {
            let f = self.value_at(k);
            if !f.is_zero() {
                sum += f * c;
            }
        }
        ScaledValue {
            value: sum,
            sqrt_half: v.scale_sqrt_half,
        }
    }
}

// ---------------------------------------------------------------------------
// Sequence generators
// ---------------------------------------------------------------------------

/// Deterministic pure rule `n ↦ L1Vec` with declared metadata. Named
/// constructors also expose symbolic per-coordinate bad index sets so
/// coordinate-wise convergence checks can work above the horizon.
#[derive(Clone)]
pub struct SeqGen {
    pub name: String,
    kind: SeqKind,
    /// Declared lower bound for the norms on a set, spot-checked by
    /// consumers: `(I, r)` claims `‖x_n‖ ≥ r` (squared comparison) for
    /// all `n ∈ I`.
    pub norm_lower_on: Option<(SetExpr, BigRational)>,
}

#[derive(Clone)]
enum SeqKind {
    Canonical,
    Remark,
    Perturbed,
    InjectivePlus { defect: bool },
    Custom(Arc<dyn Fn(u64) -> L1Vec + Send + Sync>),
}

impl std::fmt::Debug for SeqGen {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SeqGen({})", self.name)
    }
}

/// `n ↦ e_n`.
pub fn canonical_basis() -> SeqGen {
    SeqGen {
        name: "canonical".into(),
        kind: SeqKind::Canonical,
        norm_lower_on: Some((SetExpr::naturals(), BigRational::one())),
    }
}

/// `n ↦ e_n + e_{f(n)}` with `f(n)` the column index of `n` under the
/// fixed pairing (so `n = 1` gives `2·e_1`).
pub fn remark_sequence() -> SeqGen {
    SeqGen {
        name: "remark".into(),
        kind: SeqKind::Remark,
        norm_lower_on: Some((SetExpr::naturals(), BigRational::from_integer(2.into()))),
    }
}

/// `n ↦ (1/n)·e_1 + e_{n+1}`.
pub fn perturbed_basis() -> SeqGen {
    SeqGen {
        name: "perturbed".into(),
        kind: SeqKind::Perturbed,
        norm_lower_on: Some((SetExpr::naturals(), BigRational::one())),
    }
}

/// `n ↦ e_n` (`defect = false`) or `n ↦ e_n + (1/n)·e_1` — injective
/// coordinate enumerations used by the triangular column extraction.
pub fn injective_basis(defect: bool) -> SeqGen {
    SeqGen {
        name: if defect {
            "injective-plus".into()
        } else {
            "injective".into()
        },
        kind: SeqKind::InjectivePlus { defect },
        norm_lower_on: Some((SetExpr::naturals(), BigRational::one())),
    }
}

pub fn user_defined(
    name: impl Into<String>,
    rule: Arc<dyn Fn(u64) -> L1Vec + Send + Sync>,
) -> SeqGen {
    SeqGen {
        name: name.into(),
        kind: SeqKind::Custom(rule),
        norm_lower_on: None,
    }
}

impl SeqGen {
    pub fn eval(&self, n: u64) -> L1Vec {
        let n = n.max(1);
        match &self.kind {
            SeqKind::Canonical => L1Vec::basis(n),
            SeqKind::Remark => {
                let col = ColumnPartition.column_of(n);
                L1Vec::basis(n).add(&L1Vec::basis(col)).expect("unscaled")
            }
            SeqKind::Perturbed => L1Vec::from_coords([
                (1, BigRational::new(BigInt::one(), BigInt::from(n))),
                (n + 1, BigRational::one()),
            ]),
            SeqKind::InjectivePlus { defect } => {
                if *defect {
                    L1Vec::basis(n)
                        .add(&L1Vec::from_coords([(
                            1,
                            BigRational::new(BigInt::one(), BigInt::from(n)),
                        )]))
                        .expect("unscaled")
                } else {
                    L1Vec::basis(n)
                }
            }
            SeqKind::Custom(rule) => rule(n),
        }
    }

    /// Symbolic bad index set `{n : |e_k*(x_n)| ≥ ε}` for the named
    /// sequences; `None` means the consumer must enumerate.
    pub fn coordinate_bad_set(&self, k: u64, eps: &BigRational) -> Option<SetExpr> {
        if eps <= &BigRational::zero() {
            return None;
        }
        let one = BigRational::one();
        match &self.kind {
            SeqKind::Canonical => Some(if *eps <= one {
                SetExpr::finite([k])
            } else {
                SetExpr::empty()
            }),
            SeqKind::Remark => {
                // Coordinate k is hit by x_k itself and by every n in
                // column k; the value doubles when the two collide.
                if *eps <= one {
                    Some(SetExpr::finite([k]).union(SetExpr::column(k)))
                } else if *eps <= BigRational::from_integer(2.into()) {
                    Some(if ColumnPartition.column_of(k) == k {
                        SetExpr::finite([k])
                    } else {
                        SetExpr::empty()
                    })
                } else {
                    Some(SetExpr::empty())
                }
            }
            SeqKind::Perturbed => Some(if k == 1 {
                // |1/n| ≥ ε up to n ≤ 1/ε.
                let cutoff = (one / eps).floor().to_integer();
                let cutoff = cutoff.to_u64().unwrap_or(u64::MAX);
                SetExpr::Ep(EpSet::from_interval(1, cutoff))
            } else if *eps <= one && k >= 2 {
                SetExpr::finite([k - 1])
            } else {
                SetExpr::empty()
            }),
            SeqKind::InjectivePlus { defect } => Some(if k == 1 {
                let mut bad = if *eps <= one {
                    SetExpr::finite([1])
                } else {
                    SetExpr::empty()
                };
                if *defect {
                    let cutoff = (one / eps).floor().to_integer();
                    let cutoff = cutoff.to_u64().unwrap_or(u64::MAX);
                    bad = bad.union(SetExpr::Ep(EpSet::from_interval(1, cutoff)));
                }
                bad
            } else if *eps <= one {
                SetExpr::finite([k])
            } else {
                SetExpr::empty()
            }),
            SeqKind::Custom(_) => None,
        }
    }

    /// Symbolic good set for norm-mode convergence to zero, when the
    /// sequence has a closed form.
    pub fn norm_good_set_to_zero(&self, eps: &BigRational) -> Option<SetExpr> {
        let one = BigRational::one();
        match &self.kind {
            SeqKind::Canonical => Some(if *eps > one {
                SetExpr::naturals()
            } else {
                SetExpr::empty()
            }),
            SeqKind::Remark => Some(if *eps > BigRational::from_integer(2.into()) {
                SetExpr::naturals()
            } else {
                SetExpr::empty()
            }),
            SeqKind::Perturbed | SeqKind::InjectivePlus { defect: true } => {
                // ‖x_n‖ = 1 + 1/n.
                if *eps <= one {
                    Some(SetExpr::empty())
                } else {
                    // 1 + 1/n < ε ⟺ n > 1/(ε−1).
                    let cutoff = (one.clone() / (eps - one)).floor().to_integer();
                    let cutoff = cutoff.to_u64().unwrap_or(u64::MAX);
                    Some(SetExpr::tail(cutoff + 1))
                }
            }
            SeqKind::InjectivePlus { defect: false } => Some(if *eps > one {
                SetExpr::naturals()
            } else {
                SetExpr::empty()
            }),
            SeqKind::Custom(_) => None,
        }
    }
}

/// Exact Cesàro mean `(1/n)·Σ_{j≤n} x_j`.
pub fn cesaro_means(g: &SeqGen, n: u64) -> Result<L1Vec, FilterlabError> {
    if n == 0 {
        return Err(FilterlabError::InvalidArgument(
            "Cesàro mean needs n ≥ 1".into(),
        ));
    }
    let mut acc = L1Vec::zero();
    for j in 1..=n {
        acc = acc.add(&g.eval(j))?;
    }
    Ok(acc.scale(&BigRational::new(BigInt::one(), BigInt::from(n))))
}

// ---------------------------------------------------------------------------
// Scalar sequences
// ---------------------------------------------------------------------------

/// Deterministic scalar sequence with a declared bound when one holds.
#[derive(Clone)]
pub struct ScalarSeq {
    pub name: String,
    kind: ScalarKind,
    /// Declared `sup |x_n|`; required by the statistical/Cesàro
    /// comparison.
    pub bound: Option<BigRational>,
}

#[derive(Clone)]
enum ScalarKind {
    Const(BigRational),
    Reciprocal,
    AlternatingSign,
    Linear,
    SquareIndicator,
    /// Repeating pattern of values.
    Periodic(Vec<BigRational>),
    /// `value` everywhere except on the spike set.
    Spiked {
        value: BigRational,
        spike: BigRational,
        spikes: SpikeSet,
    },
    Custom(Arc<dyn Fn(u64) -> BigRational + Send + Sync>),
}

/// Sparse index sets with a certified counting bound.
#[derive(Clone, Debug, PartialEq)]
pub enum SpikeSet {
    /// Perfect squares: count ≤ isqrt(n).
    Squares,
    /// Powers of two: count ≤ log2(n) + 1.
    PowersOfTwo,
}

impl SpikeSet {
    pub fn member(&self, n: u64) -> bool {
        match self {
            SpikeSet::Squares => {
                let r = (n as f64).sqrt() as u64;
                [r.saturating_sub(1), r, r + 1].iter().any(|&k| k * k == n)
            }
            SpikeSet::PowersOfTwo => n.is_power_of_two(),
        }
    }

    pub fn count_bound(&self, n: u64) -> u64 {
        match self {
            SpikeSet::Squares => isqrt(n),
            SpikeSet::PowersOfTwo => n.max(1).ilog2() as u64 + 1,
        }
    }

    /// Exact count of members in `[1, n]` (closed form).
    pub fn count_exact(&self, n: u64) -> u64 {
        match self {
            SpikeSet::Squares => isqrt(n),
            SpikeSet::PowersOfTwo => {
                if n == 0 {
                    0
                } else {
                    n.ilog2() as u64 + 1
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SpikeSet::Squares => "declared: count(n) <= isqrt(n) (perfect squares)".into(),
            SpikeSet::PowersOfTwo => "declared: count(n) <= log2(n) + 1 (powers of two)".into(),
        }
    }
}

fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

impl std::fmt::Debug for ScalarSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ScalarSeq({})", self.name)
    }
}

/// Good index set of a scalar convergence query.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarGoodSet {
    Expr(SetExpr),
    /// The good set is the complement of a sparse bad set with a
    /// declared counting bound (verifiable at any horizon).
    CoSparse { bad: SpikeSet },
    /// The good set itself is sparse (so it cannot be a member of any
    /// free filter refining the density-zero ideal).
    Sparse { good: SpikeSet },
}

impl ScalarSeq {
    pub fn constant(v: BigRational) -> ScalarSeq {
        ScalarSeq {
            name: format!("const({})", format_rational(&v)),
            bound: Some(v.abs()),
            kind: ScalarKind::Const(v),
        }
    }

    pub fn reciprocal() -> ScalarSeq {
        ScalarSeq {
            name: "reciprocal".into(),
            kind: ScalarKind::Reciprocal,
            bound: Some(BigRational::one()),
        }
    }

    pub fn alternating_sign() -> ScalarSeq {
        ScalarSeq {
            name: "alternating".into(),
            kind: ScalarKind::AlternatingSign,
            bound: Some(BigRational::one()),
        }
    }

    pub fn linear() -> ScalarSeq {
        ScalarSeq {
            name: "linear".into(),
            kind: ScalarKind::Linear,
            bound: None,
        }
    }

    pub fn square_indicator() -> ScalarSeq {
        ScalarSeq {
            name: "squares-indicator".into(),
            kind: ScalarKind::SquareIndicator,
            bound: Some(BigRational::one()),
        }
    }

    pub fn periodic(values: Vec<BigRational>) -> Result<ScalarSeq, FilterlabError> {
        if values.is_empty() {
            return Err(FilterlabError::InvalidArgument(
                "periodic scalar sequence needs at least one value".into(),
            ));
        }
        let bound = values.iter().map(|v| v.abs()).max().unwrap();
        Ok(ScalarSeq {
            name: "periodic".into(),
            kind: ScalarKind::Periodic(values),
            bound: Some(bound),
        })
    }

    pub fn spiked(value: BigRational, spike: BigRational, spikes: SpikeSet) -> ScalarSeq {
        let bound = value.abs().max(spike.abs());
        ScalarSeq {
            name: format!("spiked({spikes:?})"),
            kind: ScalarKind::Spiked {
                value,
                spike,
                spikes,
            },
            bound: Some(bound),
        }
    }

    pub fn custom(
        name: impl Into<String>,
        bound: Option<BigRational>,
        rule: Arc<dyn Fn(u64) -> BigRational + Send + Sync>,
    ) -> ScalarSeq {
        ScalarSeq {
            name: name.into(),
            kind: ScalarKind::Custom(rule),
            bound,
        }
    }

    pub fn eval(&self, n: u64) -> BigRational {
        let n = n.max(1);
        match &self.kind {
            ScalarKind::Const(v) => v.clone(),
            ScalarKind::Reciprocal => BigRational::new(BigInt::one(), BigInt::from(n)),
            ScalarKind::AlternatingSign => {
                if n % 2 == 0 {
                    BigRational::one()
                } else {
                    -BigRational::one()
                }
            }
            ScalarKind::Linear => BigRational::from_integer(BigInt::from(n)),
            ScalarKind::SquareIndicator => {
                if SpikeSet::Squares.member(n) {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
            ScalarKind::Periodic(values) => values[((n - 1) as usize) % values.len()].clone(),
            ScalarKind::Spiked {
                value,
                spike,
                spikes,
            } => {
                if spikes.member(n) {
                    spike.clone()
                } else {
                    value.clone()
                }
            }
            ScalarKind::Custom(rule) => rule(n),
        }
    }

    /// Distinct values with exact counts up to `n`, for kinds whose
    /// value multiset has a closed form.
    pub fn census(&self, n: u64) -> Option<Vec<(BigRational, u64)>> {
        let n = n.max(1);
        match &self.kind {
            ScalarKind::Const(v) => Some(vec![(v.clone(), n)]),
            ScalarKind::AlternatingSign => Some(vec![
                (BigRational::one(), n / 2),
                (-BigRational::one(), n - n / 2),
            ]),
            ScalarKind::SquareIndicator => {
                let squares = SpikeSet::Squares.count_exact(n);
                Some(vec![
                    (BigRational::one(), squares),
                    (BigRational::zero(), n - squares),
                ])
            }
            ScalarKind::Periodic(values) => {
                let p = values.len() as u64;
                let mut census: Vec<(BigRational, u64)> = Vec::new();
                for (i, v) in values.iter().enumerate() {
                    let i = i as u64;
                    let count = n / p + u64::from(n % p > i);
                    match census.iter_mut().find(|(u, _)| u == v) {
                        Some((_, c)) => *c += count,
                        None => census.push((v.clone(), count)),
                    }
                }
                Some(census)
            }
            ScalarKind::Spiked {
                value,
                spike,
                spikes,
            } => {
                let s = spikes.count_exact(n);
                Some(vec![(spike.clone(), s), (value.clone(), n - s)])
            }
            _ => None,
        }
    }

    /// Exact good set `{n : |x_n − candidate| < ε}` when the sequence
    /// shape admits one.
    pub fn good_set(&self, candidate: &BigRational, eps: &BigRational) -> Option<ScalarGoodSet> {
        if eps <= &BigRational::zero() {
            return None;
        }
        let close = |v: &BigRational| (v - candidate).abs() < *eps;
        match &self.kind {
            ScalarKind::Const(v) => Some(ScalarGoodSet::Expr(if close(v) {
                SetExpr::naturals()
            } else {
                SetExpr::empty()
            })),
            ScalarKind::Reciprocal => {
                // 1/n tends to 0, so the eventual behavior is decided by
                // |candidate| vs ε; a head scan settles the boundary.
                let eventually_good = candidate.abs() < *eps
                    || (candidate.abs() == *eps && candidate.is_positive());
                let mut cutoff = 4u64;
                if let Some(c) = (BigRational::one() / eps).ceil().to_integer().to_u64() {
                    cutoff = cutoff.max(2 * c + 2);
                }
                if !candidate.is_zero() {
                    let gap = (candidate.abs() - eps).abs();
                    if !gap.is_zero() {
                        if let Some(c) = (BigRational::one() / gap).ceil().to_integer().to_u64() {
                            cutoff = cutoff.max(c.saturating_add(2));
                        }
                    }
                }
                if cutoff > 1 << 22 {
                    return None;
                }
                let head: Vec<u64> = (1..=cutoff).filter(|&n| close(&self.eval(n))).collect();
                let expr = if eventually_good {
                    SetExpr::finite(head).union(SetExpr::tail(cutoff + 1))
                } else {
                    SetExpr::finite(head)
                };
                Some(ScalarGoodSet::Expr(expr))
            }
            ScalarKind::AlternatingSign | ScalarKind::Periodic(_) => {
                let p = match &self.kind {
                    ScalarKind::AlternatingSign => 2u64,
                    ScalarKind::Periodic(values) => values.len() as u64,
                    _ => unreachable!(),
                };
                let bits: Vec<bool> = (1..=p).map(|n| close(&self.eval(n))).collect();
                Some(ScalarGoodSet::Expr(SetExpr::Ep(EpSet::new(
                    Vec::new(),
                    bits,
                ))))
            }
            ScalarKind::Linear => {
                // |n − c| < ε holds on a bounded window only.
                let lo = (candidate - eps).ceil().to_integer().to_u64().unwrap_or(1);
                let hi = (candidate + eps)
                    .floor()
                    .to_integer()
                    .to_u64()
                    .unwrap_or(0);
                let good: Vec<u64> = (lo.max(1)..=hi).filter(|&n| close(&self.eval(n))).collect();
                Some(ScalarGoodSet::Expr(SetExpr::finite(good)))
            }
            ScalarKind::SquareIndicator => {
                let good_off = close(&BigRational::zero());
                let good_on = close(&BigRational::one());
                Some(match (good_off, good_on) {
                    (true, true) => ScalarGoodSet::Expr(SetExpr::naturals()),
                    (false, false) => ScalarGoodSet::Expr(SetExpr::empty()),
                    (true, false) => ScalarGoodSet::CoSparse {
                        bad: SpikeSet::Squares,
                    },
                    (false, true) => ScalarGoodSet::Sparse {
                        good: SpikeSet::Squares,
                    },
                })
            }
            ScalarKind::Spiked {
                value,
                spike,
                spikes,
            } => {
                let good_value = close(value);
                let good_spike = close(spike);
                Some(match (good_value, good_spike) {
                    (true, true) => ScalarGoodSet::Expr(SetExpr::naturals()),
                    (false, false) => ScalarGoodSet::Expr(SetExpr::empty()),
                    (true, false) => ScalarGoodSet::CoSparse {
                        bad: spikes.clone(),
                    },
                    (false, true) => ScalarGoodSet::Sparse {
                        good: spikes.clone(),
                    },
                })
            }
            ScalarKind::Custom(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{int, rat};

    #[test]
    fn norms_and_coords() {
        let e3 = L1Vec::basis(3);
        assert_eq!(e3.norm1_rational(), Some(int(1)));
        assert_eq!(e3.coord_raw(3), int(1));
        assert_eq!(e3.coord_raw(4), int(0));
        let v = L1Vec::from_coords([(1, rat(1, 2)), (9, int(1))]);
        assert_eq!(v.norm1_rational(), Some(rat(3, 2)));
    }

    #[test]
    fn masses() {
        let e5 = L1Vec::basis(5);
        assert!(e5.tail_mass(6).is_zero());
        assert_eq!(e5.tail_mass(1).value, int(1));
        let v = L1Vec::from_coords([(1, rat(1, 2)), (9, int(1))]);
        assert_eq!(v.head_mass(1).value, rat(1, 2));
        // Partition identity head(m) + tail(m+1) = norm.
        for m in 0..12 {
            assert_eq!(
                v.head_mass(m).value.clone() + v.tail_mass(m + 1).value.clone(),
                v.norm1().value
            );
        }
    }

    #[test]
    fn summing_functional() {
        let f = TestFunctional::Summing;
        let v = L1Vec::basis(1).add(&L1Vec::basis(2)).unwrap();
        assert_eq!(f.apply(&v).value, int(2));
    }

    #[test]
    fn blockwise_sign_matching_recovers_norm() {
        // Σ sgn(c)·c = Σ|c| on a block-matched functional.
        let v = L1Vec::from_coords([(2, rat(-3, 4)), (5, rat(1, 3)), (9, rat(2, 3))]);
        let f = TestFunctional::block_signs(vec![
            (1, 2, int(-1)),
            (2, 5, int(1)),
            (5, 9, int(1)),
        ])
        .unwrap();
        let expect = rat(3, 4) + rat(1, 3) + rat(2, 3);
        assert_eq!(f.apply(&v).value, expect);
        assert_eq!(v.norm1().value, expect);
    }

    #[test]
    fn dual_ball_violations_rejected() {
        assert!(TestFunctional::ep_signs(vec![rat(3, 2)], vec![int(1)]).is_err());
        assert!(TestFunctional::block_signs(vec![(1, 4, rat(9, 8))]).is_err());
        assert!(TestFunctional::block_signs(vec![(1, 5, int(1)), (3, 8, int(1))]).is_err());
    }

    #[test]
    fn named_sequences() {
        assert_eq!(canonical_basis().eval(7), L1Vec::basis(7));
        // Remark sequence at n = 1: both terms land on coordinate 1.
        let x1 = remark_sequence().eval(1);
        assert_eq!(x1.coord_raw(1), int(2));
        // At n = 3 (column 1): e_3 + e_1.
        let x3 = remark_sequence().eval(3);
        assert_eq!(x3.coord_raw(3), int(1));
        assert_eq!(x3.coord_raw(1), int(1));
        // Perturbed basis at 4: (1/4)e_1 + e_5 with norm 5/4.
        let x4 = perturbed_basis().eval(4);
        assert_eq!(x4.coord_raw(1), rat(1, 4));
        assert_eq!(x4.coord_raw(5), int(1));
        assert_eq!(x4.norm1_rational(), Some(rat(5, 4)));
    }

    #[test]
    fn cesaro_means_examples() {
        let c = cesaro_means(&canonical_basis(), 4).unwrap();
        for k in 1..=4 {
            assert_eq!(c.coord_raw(k), rat(1, 4));
        }
        assert_eq!(c.norm1_rational(), Some(int(1)));
        // Constant sequence: mean is the constant.
        let v = L1Vec::from_coords([(2, rat(5, 3))]);
        let vv = v.clone();
        let g = user_defined("const", Arc::new(move |_| vv.clone()));
        assert_eq!(cesaro_means(&g, 10).unwrap(), v);
    }

    #[test]
    fn vector_json_round_trip() {
        let v = L1Vec::from_coords([(3, rat(1, 2)), (11, rat(-7, 5))]).with_sqrt_half_scale(false);
        let j = v.to_json();
        assert_eq!(L1Vec::from_json(&j).unwrap(), v);
        let w = L1Vec::from_coords([(1, int(2))]).with_sqrt_half_scale(true);
        assert_eq!(L1Vec::from_json(&w.to_json()).unwrap(), w);
    }

    #[test]
    fn scalar_good_sets() {
        let seq = ScalarSeq::reciprocal();
        // 1/n → 0: good set for any ε is cofinite.
        match seq.good_set(&int(0), &rat(1, 10)).unwrap() {
            ScalarGoodSet::Expr(e) => {
                for n in 1..=200i64 {
                    assert_eq!(e.member(n as u64), rat(1, n) < rat(1, 10), "n={n}");
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        // Alternating signs vs candidate 1 at ε = 1/2: evens good.
        let seq = ScalarSeq::alternating_sign();
        match seq.good_set(&int(1), &rat(1, 2)).unwrap() {
            ScalarGoodSet::Expr(e) => {
                for n in 1..=50 {
                    assert_eq!(e.member(n), n % 2 == 0);
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        // Square indicator vs 0 at ε = 1/2: co-sparse.
        let seq = ScalarSeq::square_indicator();
        assert_eq!(
            seq.good_set(&int(0), &rat(1, 2)),
            Some(ScalarGoodSet::CoSparse {
                bad: SpikeSet::Squares
            })
        );
    }

    #[test]
    fn scaled_vectors_compare_on_squares() {
        let w = L1Vec::from_coords([(1, int(1)), (2, int(-1))]).with_sqrt_half_scale(true);
        assert_eq!(w.norm1_squared(), int(2));
        assert!(w.norm1_rational().is_none());
        assert!(w.add(&L1Vec::basis(1)).is_err());
        let sum = w.add(&L1Vec::zero()).unwrap();
        assert_eq!(sum, w);
    }
}
