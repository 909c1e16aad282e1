//! Finite lattice groups standing in for polynomial-growth Lie groups.
//!
//! Euclidean families are tori `Z_N^n` with spacing `h = L/N`. The Heisenberg
//! family is the finite Heisenberg group over `Z_N` in polarized form,
//! `(i,j,c)(i',j',c') = (i+i', j+j', c+c'+ij')`, read in exponential
//! coordinates `x = ih, y = jh, z = (c - ij/2) h^2`. The generators `(1,0,0)`
//! and `(0,1,0)` then act exactly like `exp(hX)` and `exp(hY)` and generate the
//! whole group. Coordinates use centered representatives, so the identity sits
//! at node 0 with coordinate 0.

use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::sparse::Stencil;
use crate::stats;

pub const MIN_NODES_PER_AXIS: usize = 8;
pub const MAX_EUCLIDEAN_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeId(u64);

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

impl LatticeId {
    fn fresh() -> Self {
        LatticeId(NEXT_ID.fetch_add(1, Ordering::Relaxed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GroupFamily {
    Euclidean(usize),
    Heisenberg,
    Rototranslation,
}

impl GroupFamily {
    pub fn coordinate_dim(&self) -> usize {
        match self {
            GroupFamily::Euclidean(n) => *n,
            GroupFamily::Heisenberg | GroupFamily::Rototranslation => 3,
        }
    }

    pub fn field_count(&self) -> usize {
        match self {
            GroupFamily::Euclidean(n) => *n,
            GroupFamily::Heisenberg | GroupFamily::Rototranslation => 2,
        }
    }

    /// `(local dimension, dimension at infinity)`.
    pub fn dimensions(&self) -> (usize, usize) {
        match self {
            GroupFamily::Euclidean(n) => (*n, *n),
            GroupFamily::Heisenberg => (4, 4),
            GroupFamily::Rototranslation => (3, 2),
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupFamily::Euclidean(n) => write!(f, "euclidean{n}"),
            GroupFamily::Heisenberg => write!(f, "heisenberg1"),
            GroupFamily::Rototranslation => write!(f, "rototranslation"),
        }
    }
}

impl FromStr for GroupFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "heisenberg" | "heisenberg1" | "h1" => return Ok(GroupFamily::Heisenberg),
            "rototranslation" | "se2" | "se(2)" => return Ok(GroupFamily::Rototranslation),
            _ => {}
        }
        let digits = t
            .strip_prefix("euclidean")
            .map(|rest| rest.trim_matches(|c| c == '(' || c == ')' || c == '-' || c == '_'));
        match digits.and_then(|d| d.parse::<usize>().ok()) {
            Some(n) if (1..=MAX_EUCLIDEAN_DIM).contains(&n) => Ok(GroupFamily::Euclidean(n)),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

impl TryFrom<String> for GroupFamily {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GroupFamily> for String {
    fn from(f: GroupFamily) -> String {
        f.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: GroupFamily,
    pub box_size: f64,
    pub nodes_per_axis: usize,
}

impl GroupSpec {
    pub fn new(family: GroupFamily, box_size: f64, nodes_per_axis: usize) -> Self {
        GroupSpec { family, box_size, nodes_per_axis }
    }

    pub fn spacing(&self) -> f64 {
        self.box_size / self.nodes_per_axis as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < MIN_NODES_PER_AXIS {
            return Err(Error::InvalidSpec(format!(
                "nodes_per_axis = {} is below the minimum {MIN_NODES_PER_AXIS}",
                self.nodes_per_axis
            )));
        }
        if !(self.box_size.is_finite() && self.box_size > 0.0) {
            return Err(Error::InvalidSpec(format!("box_size = {} must be positive", self.box_size)));
        }
        if let GroupFamily::Euclidean(n) = self.family {
            if !(1..=MAX_EUCLIDEAN_DIM).contains(&n) {
                return Err(Error::InvalidSpec(format!("euclidean dimension {n} not in 1..=3")));
            }
        }
        let nodes = (self.nodes_per_axis as u128).pow(self.family.coordinate_dim() as u32);
        if nodes > u32::MAX as u128 {
            return Err(Error::InvalidSpec(format!("{nodes} nodes exceed the addressable range")));
        }
        Ok(())
    }
}

/// Which side a generating field acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    /// Left-invariant `X_j`, realized through right multiplication.
    Left(usize),
    /// Right-invariant `Y_j`, realized through left multiplication.
    Right(usize),
}

#[derive(Debug, Clone)]
struct StepSet {
    targets: Vec<u32>,
    weight: f64,
}

#[derive(Debug, Clone)]
pub struct LatticeGroup {
    id: LatticeId,
    spec: GroupSpec,
    node_count: usize,
    haar_weight: f64,
    coord_spacing: [f64; 3],
    left_fields: Vec<Stencil>,
    right_fields: Vec<Stencil>,
    laplacian: Stencil,
    steps: Vec<StepSet>,
}

pub fn centered(r: usize, n: usize) -> i64 {
    if 2 * r < n {
        r as i64
    } else {
        r as i64 - n as i64
    }
}

fn wrap(v: i64, n: usize) -> usize {
    v.rem_euclid(n as i64) as usize
}

pub fn build_lattice(spec: GroupSpec) -> Result<LatticeGroup> {
    spec.validate()?;
    match spec.family {
        GroupFamily::Euclidean(_) | GroupFamily::Heisenberg => Ok(build_exact(spec)),
        GroupFamily::Rototranslation => build_rototranslation(spec),
    }
}

#[cfg(feature = "rototranslation")]
fn build_rototranslation(spec: GroupSpec) -> Result<LatticeGroup> {
    Ok(crate::se2::build(spec))
}

#[cfg(not(feature = "rototranslation"))]
fn build_rototranslation(spec: GroupSpec) -> Result<LatticeGroup> {
    Err(Error::FeatureDisabled(spec.family.to_string()))
}

fn build_exact(spec: GroupSpec) -> LatticeGroup {
    let n_axis = spec.nodes_per_axis;
    let h = spec.spacing();
    let dim = spec.family.coordinate_dim();
    let node_count = n_axis.pow(dim as u32);
    let k = spec.family.field_count();
    let (coord_spacing, haar_weight) = match spec.family {
        GroupFamily::Euclidean(n) => {
            let mut c = [0.0; 3];
            c[..n].fill(h);
            (c, h.powi(n as i32))
        }
        _ => ([h, h, h * h], h.powi(4)),
    };
    let mut proto = LatticeGroup {
        id: LatticeId::fresh(),
        spec,
        node_count,
        haar_weight,
        coord_spacing,
        left_fields: Vec::new(),
        right_fields: Vec::new(),
        laplacian: Stencil::from_rows(Vec::new()),
        steps: Vec::new(),
    };
    let gens: Vec<usize> = (0..k).map(|j| proto.generator(j)).collect();
    let inv: Vec<usize> = gens.iter().map(|&g| proto.inverse(g)).collect();
    let mut right_fwd = Vec::with_capacity(k);
    let mut right_bwd = Vec::with_capacity(k);
    let mut left_fwd = Vec::with_capacity(k);
    let mut left_bwd = Vec::with_capacity(k);
    for j in 0..k {
        right_fwd.push((0..node_count).map(|v| proto.product(v, gens[j])).collect::<Vec<_>>());
        right_bwd.push((0..node_count).map(|v| proto.product(v, inv[j])).collect::<Vec<_>>());
        left_fwd.push((0..node_count).map(|v| proto.product(gens[j], v)).collect::<Vec<_>>());
        left_bwd.push((0..node_count).map(|v| proto.product(inv[j], v)).collect::<Vec<_>>());
    }
    let diff = |fwd: &[usize], bwd: &[usize]| {
        Stencil::from_rows(
            (0..node_count)
                .map(|v| vec![(fwd[v], 0.5 / h), (bwd[v], -0.5 / h)])
                .collect(),
        )
    };
    proto.left_fields = (0..k).map(|j| diff(&right_fwd[j], &right_bwd[j])).collect();
    proto.right_fields = (0..k).map(|j| diff(&left_fwd[j], &left_bwd[j])).collect();
    let h2 = h * h;
    proto.laplacian = Stencil::from_rows(
        (0..node_count)
            .map(|v| {
                let mut row = vec![(v, 2.0 * k as f64 / h2)];
                for j in 0..k {
                    row.push((right_fwd[j][v], -1.0 / h2));
                    row.push((right_bwd[j][v], -1.0 / h2));
                }
                row
            })
            .collect(),
    );
    proto.steps = right_fwd
        .into_iter()
        .chain(right_bwd)
        .map(|t| StepSet { targets: t.into_iter().map(|x| x as u32).collect(), weight: h })
        .collect();
    proto
}

impl LatticeGroup {
    #[cfg(feature = "rototranslation")]
    pub(crate) fn from_parts(
        spec: GroupSpec,
        haar_weight: f64,
        coord_spacing: [f64; 3],
        left_fields: Vec<Stencil>,
        right_fields: Vec<Stencil>,
        laplacian: Stencil,
        steps: Vec<(Vec<u32>, f64)>,
    ) -> Self {
        LatticeGroup {
            id: LatticeId::fresh(),
            spec,
            node_count: laplacian.rows(),
            haar_weight,
            coord_spacing,
            left_fields,
            right_fields,
            laplacian,
            steps: steps.into_iter().map(|(targets, weight)| StepSet { targets, weight }).collect(),
        }
    }

    pub fn id(&self) -> LatticeId {
        self.id
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn family(&self) -> GroupFamily {
        self.spec.family
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn haar_weight(&self) -> f64 {
        self.haar_weight
    }

    pub fn spacing(&self) -> f64 {
        self.spec.spacing()
    }

    /// Coordinate spacing along each axis (unused axes are 0).
    pub fn coord_spacing(&self) -> [f64; 3] {
        self.coord_spacing
    }

    pub fn field_count(&self) -> usize {
        self.spec.family.field_count()
    }

    pub fn local_dim(&self) -> usize {
        self.spec.family.dimensions().0
    }

    pub fn dim_at_infinity(&self) -> usize {
        self.spec.family.dimensions().1
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Total Haar measure of the lattice.
    pub fn volume(&self) -> f64 {
        self.haar_weight * self.node_count as f64
    }

    /// Rough upper bound on the CC diameter, used to size time grids.
    pub fn diameter(&self) -> f64 {
        let l = self.spec.box_size;
        match self.spec.family {
            GroupFamily::Euclidean(n) => l * (n as f64).sqrt() / 2.0,
            GroupFamily::Heisenberg => l / 2f64.sqrt(),
            GroupFamily::Rototranslation => l / 2f64.sqrt() + std::f64::consts::PI,
        }
    }

    /// Period of the z coordinate on the Heisenberg lattice.
    pub fn z_period(&self) -> Option<f64> {
        match self.spec.family {
            GroupFamily::Heisenberg => Some(self.coord_spacing[2] * self.spec.nodes_per_axis as f64),
            _ => None,
        }
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v < self.node_count {
            Ok(())
        } else {
            Err(Error::InvalidNode { node: v, len: self.node_count })
        }
    }

    pub fn residues(&self, v: usize) -> [usize; 3] {
        let n = self.spec.nodes_per_axis;
        let dim = self.spec.family.coordinate_dim();
        let mut out = [0; 3];
        let mut rest = v;
        for a in (0..dim).rev() {
            out[a] = rest % n;
            rest /= n;
        }
        out
    }

    pub fn node_from_residues(&self, r: [usize; 3]) -> usize {
        let n = self.spec.nodes_per_axis;
        let dim = self.spec.family.coordinate_dim();
        r[..dim].iter().fold(0, |acc, &x| acc * n + x % n)
    }

    /// Centered representatives of the node residues.
    pub fn integer_coords(&self, v: usize) -> [i64; 3] {
        let n = self.spec.nodes_per_axis;
        let r = self.residues(v);
        let dim = self.spec.family.coordinate_dim();
        let mut out = [0; 3];
        for a in 0..dim {
            out[a] = centered(r[a], n);
        }
        out
    }

    /// Coordinates of a node in the centered box.
    pub fn coords(&self, v: usize) -> [f64; 3] {
        let c = self.integer_coords(v);
        if self.spec.family == GroupFamily::Heisenberg {
            let n = self.spec.nodes_per_axis as f64;
            let w = c[2] as f64 - (c[0] * c[1]) as f64 / 2.0;
            let z = (w + n / 2.0).rem_euclid(n) - n / 2.0;
            let h = self.spacing();
            return [c[0] as f64 * h, c[1] as f64 * h, z * h * h];
        }
        [
            c[0] as f64 * self.coord_spacing[0],
            c[1] as f64 * self.coord_spacing[1],
            c[2] as f64 * self.coord_spacing[2],
        ]
    }

    /// Group element realizing `exp(h X_j)`.
    pub fn generator(&self, j: usize) -> usize {
        let mut r = [0; 3];
        let axis = if self.spec.family == GroupFamily::Rototranslation && j == 1 { 2 } else { j };
        r[axis] = 1;
        self.node_from_residues(r)
    }

    /// Group product `a * b`.
    pub fn product(&self, a: usize, b: usize) -> usize {
        let n = self.spec.nodes_per_axis;
        let (ra, rb) = (self.residues(a), self.residues(b));
        match self.spec.family {
            GroupFamily::Euclidean(_) => {
                self.node_from_residues([(ra[0] + rb[0]) % n, (ra[1] + rb[1]) % n, (ra[2] + rb[2]) % n])
            }
            GroupFamily::Heisenberg => {
                let c = (ra[2] + rb[2] + ra[0] * rb[1]) % n;
                self.node_from_residues([(ra[0] + rb[0]) % n, (ra[1] + rb[1]) % n, c])
            }
            GroupFamily::Rototranslation => self.snapped_product(a, b),
        }
    }

    pub fn inverse(&self, a: usize) -> usize {
        let n = self.spec.nodes_per_axis;
        let r = self.residues(a);
        match self.spec.family {
            GroupFamily::Euclidean(_) => {
                self.node_from_residues([(n - r[0]) % n, (n - r[1]) % n, (n - r[2]) % n])
            }
            GroupFamily::Heisenberg => {
                let c = (r[0] * r[1] + n - r[2]) % n;
                self.node_from_residues([(n - r[0]) % n, (n - r[1]) % n, c])
            }
            GroupFamily::Rototranslation => self.snapped_inverse(a),
        }
    }

    #[cfg(feature = "rototranslation")]
    fn snapped_product(&self, a: usize, b: usize) -> usize {
        crate::se2::product(self, a, b)
    }

    #[cfg(feature = "rototranslation")]
    fn snapped_inverse(&self, a: usize) -> usize {
        crate::se2::inverse(self, a)
    }

    #[cfg(not(feature = "rototranslation"))]
    fn snapped_product(&self, _a: usize, _b: usize) -> usize {
        unreachable!("rototranslation lattices cannot be built without the feature")
    }

    #[cfg(not(feature = "rototranslation"))]
    fn snapped_inverse(&self, _a: usize) -> usize {
        unreachable!("rototranslation lattices cannot be built without the feature")
    }

    pub(crate) fn field_stencil(&self, field: Field) -> Result<&Stencil> {
        let (list, j) = match field {
            Field::Left(j) => (&self.left_fields, j),
            Field::Right(j) => (&self.right_fields, j),
        };
        list.get(j).ok_or(Error::FieldIndex { index: j, k: self.field_count() })
    }

    pub(crate) fn laplacian(&self) -> &Stencil {
        &self.laplacian
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.spec.family, GroupFamily::Euclidean(_))
    }

    /// Axis lengths of the node array, slowest axis first.
    pub fn axis_lengths(&self) -> Vec<usize> {
        vec![self.spec.nodes_per_axis; self.spec.family.coordinate_dim()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Distances from `origin` to every node.
///
/// Euclidean tori use the closed-form flat distance; the other families run
/// Dijkstra on the graph of admissible steps `v -> v exp(+-h X_j)`.
pub fn cc_distance_field(g: &LatticeGroup, origin: usize) -> Result<GridFunction> {
    g.check_node(origin)?;
    let values = if g.is_euclidean() {
        let n = g.spec.nodes_per_axis;
        let h = g.spacing();
        let ro = g.residues(origin);
        (0..g.node_count)
            .map(|v| {
                let r = g.residues(v);
                let s: f64 = (0..3)
                    .map(|a| {
                        let d = centered(wrap(r[a] as i64 - ro[a] as i64, n), n) as f64 * h;
                        d * d
                    })
                    .sum();
                s.sqrt()
            })
            .collect()
    } else {
        dijkstra(g, origin)
    };
    GridFunction::from_values(g, values)
}

fn dijkstra(g: &LatticeGroup, origin: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count];
    let mut heap = BinaryHeap::new();
    dist[origin] = 0.0;
    heap.push(HeapEntry(0.0, origin));
    while let Some(HeapEntry(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for step in &g.steps {
            let w = step.targets[v] as usize;
            let nd = d + step.weight;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(HeapEntry(nd, w));
            }
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeSample {
    pub radius: f64,
    pub volume: f64,
}

/// Haar measure of open CC balls about the identity.
pub fn volume_growth(g: &LatticeGroup, radii: &[f64]) -> Result<Vec<VolumeSample>> {
    let dist = cc_distance_field(g, g.identity())?;
    Ok(volume_growth_from(g, dist.values(), radii))
}

pub(crate) fn volume_growth_from(g: &LatticeGroup, dist: &[f64], radii: &[f64]) -> Vec<VolumeSample> {
    let mut sorted = dist.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (2.0 * g.spacing(), g.spec.box_size / 2.0);
    radii
        .iter()
        .map(|&r| {
            if !(r > lo && r < hi) {
                log::warn!("radius {r} outside ({lo}, {hi}); ball may not fit the box");
            }
            let count = sorted.partition_point(|&d| d < r);
            VolumeSample { radius: r, volume: count as f64 * g.haar_weight }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub local_exponent: Option<f64>,
    pub infinity_exponent: Option<f64>,
    pub local_points: usize,
    pub infinity_points: usize,
    pub warnings: Vec<String>,
}

/// Least-squares slopes of `log V` against `log r` below and above `split_radius`.
pub fn fit_growth_exponents(samples: &[VolumeSample], split_radius: f64) -> GrowthFit {
    let usable = samples.iter().filter(|s| s.volume > 0.0 && s.radius > 0.0);
    let (below, above): (Vec<&VolumeSample>, Vec<&VolumeSample>) =
        usable.partition(|s| s.radius <= split_radius);
    let mut warnings = Vec::new();
    let mut fit = |side: &[&VolumeSample], name: &str| {
        if side.len() < 5 {
            let msg = format!("only {} radii on the {name} side; regression unreliable", side.len());
            log::warn!("{msg}");
            warnings.push(msg);
        }
        let xs: Vec<f64> = side.iter().map(|s| s.radius.ln()).collect();
        let ys: Vec<f64> = side.iter().map(|s| s.volume.ln()).collect();
        stats::slope(&xs, &ys)
    };
    let local_exponent = fit(&below, "local");
    let infinity_exponent = fit(&above, "large-scale");
    GrowthFit {
        local_exponent,
        infinity_exponent,
        local_points: below.len(),
        infinity_points: above.len(),
        warnings,
    }
}

/// `count` radii spaced geometrically over `[lo, hi]`.
pub fn geometric_radii(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    stats::geomspace(lo, hi, count)
}
