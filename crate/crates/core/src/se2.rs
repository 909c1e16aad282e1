//! Rototranslation group `SE(2)` on an `N x N x N` lattice of
//! `(x, y, angle)`; products are snapped to the nearest node.

use std::f64::consts::TAU;

use crate::lattice::{GroupSpec, LatticeGroup};
use crate::sparse::Stencil;

fn angle_step(n: usize) -> f64 {
    TAU / n as f64
}

fn continuous(g: &LatticeGroup, v: usize) -> [f64; 3] {
    let c = g.coords(v);
    [c[0], c[1], c[2]]
}

fn snap(g: &LatticeGroup, p: [f64; 3]) -> usize {
    let n = g.spec().nodes_per_axis;
    let h = g.spacing();
    let steps = [h, h, angle_step(n)];
    let mut r = [0usize; 3];
    for a in 0..3 {
        r[a] = ((p[a] / steps[a]).round() as i64).rem_euclid(n as i64) as usize;
    }
    g.node_from_residues(r)
}

fn compose(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    let (s, c) = a[2].sin_cos();
    [a[0] + c * b[0] - s * b[1], a[1] + s * b[0] + c * b[1], a[2] + b[2]]
}

pub(crate) fn product(g: &LatticeGroup, a: usize, b: usize) -> usize {
    snap(g, compose(continuous(g, a), continuous(g, b)))
}

pub(crate) fn inverse(g: &LatticeGroup, a: usize) -> usize {
    let p = continuous(g, a);
    let (s, c) = p[2].sin_cos();
    snap(g, [-(c * p[0] + s * p[1]), s * p[0] - c * p[1], -p[2]])
}

fn permutation_rows(map: &[usize], scale: f64) -> Vec<Vec<(usize, f64)>> {
    map.iter().map(|&t| vec![(t, scale)]).collect()
}

/// Snapped steps are not exact bijections, so the sub-Laplacian is the
/// symmetrized graph Laplacian of the forward steps.
pub(crate) fn build(spec: GroupSpec) -> LatticeGroup {
    let n = spec.nodes_per_axis;
    let h = spec.spacing();
    let da = angle_step(n);
    let count = n * n * n;
    let zero = Stencil::from_rows(vec![Vec::new(); count]);
    let shell = LatticeGroup::from_parts(
        spec,
        h * h * da,
        [h, h, da],
        Vec::new(),
        Vec::new(),
        zero,
        Vec::new(),
    );
    let steps_len = [h, da];
    let mut fwd = Vec::with_capacity(2);
    let mut bwd = Vec::with_capacity(2);
    let mut lfwd = Vec::with_capacity(2);
    let mut lbwd = Vec::with_capacity(2);
    for j in 0..2 {
        let gen = shell.generator(j);
        let inv = inverse(&shell, gen);
        fwd.push((0..count).map(|v| product(&shell, v, gen)).collect::<Vec<_>>());
        bwd.push((0..count).map(|v| product(&shell, v, inv)).collect::<Vec<_>>());
        lfwd.push((0..count).map(|v| product(&shell, gen, v)).collect::<Vec<_>>());
        lbwd.push((0..count).map(|v| product(&shell, inv, v)).collect::<Vec<_>>());
    }
    let diff = |f: &[usize], b: &[usize], step: f64| {
        let mut rows = permutation_rows(f, 0.5 / step);
        for (row, &t) in rows.iter_mut().zip(b) {
            row.push((t, -0.5 / step));
        }
        Stencil::from_rows(rows)
    };
    let left: Vec<Stencil> = (0..2).map(|j| diff(&fwd[j], &bwd[j], steps_len[j])).collect();
    let right: Vec<Stencil> = (0..2).map(|j| diff(&lfwd[j], &lbwd[j], steps_len[j])).collect();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); count];
    for j in 0..2 {
        let c = 1.0 / (steps_len[j] * steps_len[j]);
        for v in 0..count {
            let t = fwd[j][v];
            if t == v {
                continue;
            }
            rows[v].push((v, c));
            rows[v].push((t, -c));
            rows[t].push((t, c));
            rows[t].push((v, -c));
        }
    }
    let laplacian = Stencil::from_rows(rows);
    let steps = (0..2)
        .flat_map(|j| {
            [
                (fwd[j].iter().map(|&t| t as u32).collect::<Vec<_>>(), steps_len[j]),
                (bwd[j].iter().map(|&t| t as u32).collect::<Vec<_>>(), steps_len[j]),
            ]
        })
        .collect();
    LatticeGroup::from_parts(spec, h * h * da, [h, h, da], left, right, laplacian, steps)
}

#[cfg(test)]
mod tests {
    use crate::grid::GridFunction;
    use crate::lattice::{build_lattice, GroupFamily, GroupSpec};
    use crate::ops;

    #[test]
    fn builds_and_kills_constants() {
        let g = build_lattice(GroupSpec::new(GroupFamily::Rototranslation, 4.0, 12)).unwrap();
        assert_eq!(g.node_count(), 1728);
        assert_eq!(g.family().dimensions(), (3, 2));
        let one = GridFunction::constant(&g, 1.0);
        assert!(ops::sub_laplacian_apply(&g, &one).unwrap().max_abs() < 1e-12);
        let e = g.identity();
        assert_eq!(g.product(e, g.generator(1)), g.generator(1));
    }
}
