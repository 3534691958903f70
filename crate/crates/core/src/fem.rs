//! Piecewise-linear finite elements for the Helmholtz operator on the unit
//! square, one matrix per Karhunen–Loève mode.
//!
//! Mode `m` assembles
//!
//! ```text
//! K_m(j,k) = ∫ w_m ∇s_j·∇s_k − c² ∫ w_m s_j s_k + i c ∫_{∂D_R} w_m s_j s_k
//! ```
//!
//! with `w_0 = ᾱ` and `w_m = σ_α √λ_m φ_m`. Dirichlet nodes are eliminated;
//! their coupling to the free nodes is kept for the load vector.

use std::collections::BTreeSet;
use std::io::Write;

use nalgebra::{DMatrix, DVector, Schur};

use crate::error::{Error, Result};
use crate::field::KlExpansion;
use crate::quadrature::TriangleRule;
use crate::scalar::{cre, cx, czero, Cx, Real};
use crate::sparse::CsrMatrix;

/// A side of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// `x = 0`
    Left,
    /// `x = 1`
    Right,
    /// `y = 0`
    Bottom,
    /// `y = 1`
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" => Some(Side::Left),
            "right" => Some(Side::Right),
            "bottom" => Some(Side::Bottom),
            "top" => Some(Side::Top),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Robin,
    Dirichlet,
}

/// Uniform right-triangle mesh of the unit square from an `np × np` grid.
#[derive(Debug, Clone)]
pub struct TriMesh<R: Real> {
    np: usize,
    nodes: Vec<[R; 2]>,
    triangles: Vec<[usize; 3]>,
    kinds: Vec<NodeKind>,
    robin_edges: Vec<[usize; 2]>,
    free_index: Vec<Option<usize>>,
    dirichlet_index: Vec<Option<usize>>,
    n_free: usize,
    n_dirichlet: usize,
}

impl<R: Real> TriMesh<R> {
    pub fn new(np: usize, dirichlet: &BTreeSet<Side>) -> Result<Self> {
        if np < 3 {
            return Err(Error::InvalidParameter(format!(
                "mesh needs at least 3 points per direction, got {np}"
            )));
        }
        let h = R::one() / R::from_count(np - 1);
        let id = |ix: usize, iy: usize| iy * np + ix;
        let mut nodes = Vec::with_capacity(np * np);
        let mut kinds = Vec::with_capacity(np * np);
        for iy in 0..np {
            for ix in 0..np {
                nodes.push([R::from_count(ix) * h, R::from_count(iy) * h]);
                let sides = node_sides(ix, iy, np);
                let kind = if sides.iter().any(|s| dirichlet.contains(s)) {
                    NodeKind::Dirichlet
                } else if !sides.is_empty() {
                    NodeKind::Robin
                } else {
                    NodeKind::Interior
                };
                kinds.push(kind);
            }
        }
        let mut triangles = Vec::with_capacity(2 * (np - 1) * (np - 1));
        for iy in 0..np - 1 {
            for ix in 0..np - 1 {
                let a = id(ix, iy);
                let b = id(ix + 1, iy);
                let c = id(ix + 1, iy + 1);
                let d = id(ix, iy + 1);
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        let mut robin_edges = Vec::new();
        for side in Side::ALL {
            if dirichlet.contains(&side) {
                continue;
            }
            for s in 0..np - 1 {
                let edge = match side {
                    Side::Left => [id(0, s), id(0, s + 1)],
                    Side::Right => [id(np - 1, s), id(np - 1, s + 1)],
                    Side::Bottom => [id(s, 0), id(s + 1, 0)],
                    Side::Top => [id(s, np - 1), id(s + 1, np - 1)],
                };
                robin_edges.push(edge);
            }
        }
        let mut free_index = vec![None; nodes.len()];
        let mut dirichlet_index = vec![None; nodes.len()];
        let (mut nf, mut nd) = (0, 0);
        for (k, kind) in kinds.iter().enumerate() {
            if *kind == NodeKind::Dirichlet {
                dirichlet_index[k] = Some(nd);
                nd += 1;
            } else {
                free_index[k] = Some(nf);
                nf += 1;
            }
        }
        Ok(Self {
            np,
            nodes,
            triangles,
            kinds,
            robin_edges,
            free_index,
            dirichlet_index,
            n_free: nf,
            n_dirichlet: nd,
        })
    }

    /// Mesh with the default boundary split: Dirichlet on `x = 0`, Robin elsewhere.
    pub fn with_default_boundary(np: usize) -> Result<Self> {
        Self::new(np, &BTreeSet::from([Side::Left]))
    }

    pub fn points_per_direction(&self) -> usize {
        self.np
    }

    pub fn h(&self) -> R {
        R::one() / R::from_count(self.np - 1)
    }

    pub fn nodes(&self) -> &[[R; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn robin_edges(&self) -> &[[usize; 2]] {
        &self.robin_edges
    }

    /// Free (non-Dirichlet) degree of freedom of node `k`.
    pub fn free_index(&self, k: usize) -> Option<usize> {
        self.free_index[k]
    }

    pub fn dirichlet_index(&self, k: usize) -> Option<usize> {
        self.dirichlet_index[k]
    }

    /// `J`, the number of free degrees of freedom.
    pub fn n_free(&self) -> usize {
        self.n_free
    }

    /// `j_b`, the number of Dirichlet nodes.
    pub fn n_dirichlet(&self) -> usize {
        self.n_dirichlet
    }

    pub fn triangle_area(&self, t: usize) -> R {
        let [a, b, c] = self.triangles[t];
        let (p0, p1, p2) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1])).abs() / R::lit(2.0)
    }
}

fn node_sides(ix: usize, iy: usize, np: usize) -> Vec<Side> {
    let mut s = Vec::new();
    if ix == 0 {
        s.push(Side::Left);
    }
    if ix == np - 1 {
        s.push(Side::Right);
    }
    if iy == 0 {
        s.push(Side::Bottom);
    }
    if iy == np - 1 {
        s.push(Side::Top);
    }
    s
}

/// Quadrature used for variable coefficients inside each triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientQuadrature {
    /// Edge-midpoint rule, exact for quadratics.
    MidEdge,
    /// Collapsed Gauss rule with `n×n` points.
    CollapsedGauss(usize),
}

/// Element data passed to an [`ElementModifier`].
#[derive(Debug, Clone, Copy)]
pub struct ElementContext<R: Real> {
    pub mode: usize,
    pub triangle: usize,
    pub vertices: [[R; 2]; 3],
    pub wave_number: R,
}

/// Hook that may rewrite each local element matrix before it is scattered,
/// e.g. to add a stabilization term.
pub trait ElementModifier<R: Real>: Sync {
    fn modify(&self, ctx: &ElementContext<R>, local: &mut [[Cx<R>; 3]; 3]);
}

pub struct AssemblyOptions<'a, R: Real> {
    pub quadrature: CoefficientQuadrature,
    pub element_modifier: Option<&'a dyn ElementModifier<R>>,
}

impl<R: Real> Default for AssemblyOptions<'_, R> {
    fn default() -> Self {
        Self {
            quadrature: CoefficientQuadrature::MidEdge,
            element_modifier: None,
        }
    }
}

/// The stiffness matrix of one mode split into free/free and
/// Dirichlet/free blocks.
#[derive(Debug, Clone)]
pub struct ModeMatrix<R: Real> {
    /// `J × J` free block.
    pub free: CsrMatrix<Cx<R>>,
    /// `j_b × J`, stored so that its transpose is the free-row/Dirichlet-column block.
    pub coupling: CsrMatrix<Cx<R>>,
}

/// Assembles mode `mode` (0 = mean) of the Helmholtz operator.
pub fn assemble_mode<R: Real>(
    mesh: &TriMesh<R>,
    kle: &KlExpansion<R>,
    wave_number: R,
    mode: usize,
    opts: &AssemblyOptions<'_, R>,
) -> Result<ModeMatrix<R>> {
    if mode > kle.len() {
        return Err(Error::InvalidParameter(format!(
            "mode {mode} exceeds KLE length {}",
            kle.len()
        )));
    }
    let rule = match opts.quadrature {
        CoefficientQuadrature::MidEdge => TriangleRule::mid_edge(),
        CoefficientQuadrature::CollapsedGauss(n) => TriangleRule::collapsed_gauss(n.max(1)),
    };
    let weight = |p: [R; 2]| kle.mode_weight(mode, p);
    let c2 = wave_number * wave_number;
    let mut full: Vec<(usize, usize, Cx<R>)> = Vec::with_capacity(9 * mesh.triangles().len());

    for (t, tri) in mesh.triangles().iter().enumerate() {
        let v = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
        let area = det.abs() / R::lit(2.0);
        let grads = [
            [(v[1][1] - v[2][1]) / det, (v[2][0] - v[1][0]) / det],
            [(v[2][1] - v[0][1]) / det, (v[0][0] - v[2][0]) / det],
            [(v[0][1] - v[1][1]) / det, (v[1][0] - v[0][0]) / det],
        ];
        let mut stiff = [[R::zero(); 3]; 3];
        let mut mass = [[R::zero(); 3]; 3];
        for (q, wq) in rule.points.iter().zip(&rule.weights) {
            let (s, r) = (q[0], q[1]);
            let lam = [R::one() - s - r, s, r];
            let x = [
                v[0][0] + s * (v[1][0] - v[0][0]) + r * (v[2][0] - v[0][0]),
                v[0][1] + s * (v[1][1] - v[0][1]) + r * (v[2][1] - v[0][1]),
            ];
            let wx = *wq * R::lit(2.0) * area * weight(x);
            for a in 0..3 {
                for b in 0..3 {
                    stiff[a][b] += wx * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
                    mass[a][b] += wx * lam[a] * lam[b];
                }
            }
        }
        let mut local = [[czero::<R>(); 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                local[a][b] = cre(stiff[a][b] - c2 * mass[a][b]);
            }
        }
        if let Some(hook) = opts.element_modifier {
            let ctx = ElementContext {
                mode,
                triangle: t,
                vertices: v,
                wave_number,
            };
            hook.modify(&ctx, &mut local);
        }
        for a in 0..3 {
            for b in 0..3 {
                full.push((tri[a], tri[b], local[a][b]));
            }
        }
    }

    // i c ∫ w s_j s_k over Robin edges, Simpson's rule (exact for cubics).
    let sixth = R::one() / R::lit(6.0);
    let half = R::lit(0.5);
    for edge in mesh.robin_edges() {
        let (pa, pb) = (mesh.nodes[edge[0]], mesh.nodes[edge[1]]);
        let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
        let pm = [(pa[0] + pb[0]) * half, (pa[1] + pb[1]) * half];
        let (wa, wm, wb) = (weight(pa), weight(pm), weight(pb));
        let b_aa = len * sixth * (wa + wm);
        let b_bb = len * sixth * (wb + wm);
        let b_ab = len * sixth * wm;
        let ic = |v: R| cx(R::zero(), wave_number * v);
        full.push((edge[0], edge[0], ic(b_aa)));
        full.push((edge[1], edge[1], ic(b_bb)));
        full.push((edge[0], edge[1], ic(b_ab)));
        full.push((edge[1], edge[0], ic(b_ab)));
    }

    let mut free_t = Vec::with_capacity(full.len());
    let mut coup_t = Vec::new();
    for (gi, gk, val) in full {
        match (mesh.free_index(gi), mesh.free_index(gk)) {
            (Some(i), Some(k)) => free_t.push((i, k, val)),
            (Some(i), None) => {
                let d = mesh.dirichlet_index(gk).expect("dirichlet node");
                coup_t.push((d, i, val));
            }
            _ => {}
        }
    }
    let j = mesh.n_free();
    Ok(ModeMatrix {
        free: CsrMatrix::from_triplets(j, j, &free_t),
        coupling: CsrMatrix::from_triplets(mesh.n_dirichlet(), j, &coup_t),
    })
}

/// `K_0..K_N` together with the Dirichlet coupling of the mean mode.
#[derive(Debug, Clone)]
pub struct HelmholtzMatrices<R: Real> {
    pub k: Vec<CsrMatrix<Cx<R>>>,
    /// `K_{0,B}`, `j_b × J`.
    pub k0b: CsrMatrix<Cx<R>>,
}

impl<R: Real> HelmholtzMatrices<R> {
    pub fn assemble(
        mesh: &TriMesh<R>,
        kle: &KlExpansion<R>,
        wave_number: R,
        opts: &AssemblyOptions<'_, R>,
    ) -> Result<Self> {
        let mut k = Vec::with_capacity(kle.len() + 1);
        let mut k0b = None;
        for m in 0..=kle.len() {
            let mm = assemble_mode(mesh, kle, wave_number, m, opts)?;
            if m == 0 {
                k0b = Some(mm.coupling);
            }
            k.push(mm.free);
        }
        Ok(Self {
            k,
            k0b: k0b.expect("mean mode assembled"),
        })
    }

    pub fn k0(&self) -> &CsrMatrix<Cx<R>> {
        &self.k[0]
    }
}

/// Deterministic load data: `f0(j) = ∫ f s_j`, Dirichlet values `w_B`, and
/// the lifting `K_{0,B}ᵀ w_B`.
#[derive(Debug, Clone)]
pub struct LoadVectors<R: Real> {
    pub f0: DVector<Cx<R>>,
    pub w_b: DVector<Cx<R>>,
    pub lift: DVector<Cx<R>>,
}

impl<R: Real> LoadVectors<R> {
    /// Spatial factor of the right-hand side, `f0 − lift`.
    pub fn spatial_rhs(&self) -> DVector<Cx<R>> {
        &self.f0 - &self.lift
    }
}

pub fn assemble_rhs<R: Real>(
    mesh: &TriMesh<R>,
    matrices: &HelmholtzMatrices<R>,
    f: &dyn Fn([R; 2]) -> R,
    g: &dyn Fn([R; 2]) -> R,
    quadrature: CoefficientQuadrature,
) -> LoadVectors<R> {
    let rule = match quadrature {
        CoefficientQuadrature::MidEdge => TriangleRule::mid_edge(),
        CoefficientQuadrature::CollapsedGauss(n) => TriangleRule::collapsed_gauss(n.max(1)),
    };
    let mut f0 = DVector::from_element(mesh.n_free(), czero());
    for tri in mesh.triangles() {
        let v = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
        let area = det.abs() / R::lit(2.0);
        for (q, wq) in rule.points.iter().zip(&rule.weights) {
            let (s, r) = (q[0], q[1]);
            let lam = [R::one() - s - r, s, r];
            let x = [
                v[0][0] + s * (v[1][0] - v[0][0]) + r * (v[2][0] - v[0][0]),
                v[0][1] + s * (v[1][1] - v[0][1]) + r * (v[2][1] - v[0][1]),
            ];
            let fx = *wq * R::lit(2.0) * area * f(x);
            for a in 0..3 {
                if let Some(j) = mesh.free_index(tri[a]) {
                    f0[j] += cre(fx * lam[a]);
                }
            }
        }
    }
    let mut w_b = DVector::from_element(mesh.n_dirichlet(), czero());
    for (k, p) in mesh.nodes().iter().enumerate() {
        if let Some(d) = mesh.dirichlet_index(k) {
            w_b[d] = cre(g(*p));
        }
    }
    let lift = matrices
        .k0b
        .transpose()
        .mul_vec(&w_b)
        .expect("coupling shape matches mesh");
    LoadVectors { f0, w_b, lift }
}

/// Default size limit for dense eigenvalue computations.
pub const DENSE_EIGEN_LIMIT: usize = 4000;

/// All eigenvalues of `K_0`, sorted by real part then imaginary part.
pub fn spectrum<R: Real>(k0: &CsrMatrix<Cx<R>>, limit: usize) -> Result<Vec<Cx<R>>> {
    let n = k0.nrows();
    if n > limit {
        return Err(Error::SizeLimit {
            context: "dense eigenvalue computation",
            size: n,
            limit,
        });
    }
    let dense: DMatrix<Cx<R>> = k0.to_dense();
    let schur = Schur::new(dense);
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::NonFinite("Schur form did not yield eigenvalues".into()))?;
    let mut ev: Vec<Cx<R>> = ev.iter().copied().collect();
    ev.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(ev)
}

/// Writes eigenvalues as CSV with header `re,im`.
pub fn write_spectrum_csv<R: Real, W: Write>(out: &mut W, eigs: &[Cx<R>]) -> std::io::Result<()> {
    writeln!(out, "re,im")?;
    for e in eigs {
        writeln!(out, "{:.17e},{:.17e}", e.re, e.im)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type C = Cx<f64>;

    fn kle(n: usize) -> KlExpansion<f64> {
        KlExpansion::new(n, 1.0, 1.0, 5.0).unwrap()
    }

    #[test]
    fn mesh_counts() {
        let m = TriMesh::<f64>::with_default_boundary(3).unwrap();
        assert_eq!(m.nodes().len(), 9);
        assert_eq!(m.triangles().len(), 8);
        assert_eq!(m.n_dirichlet(), 3);
        assert_eq!(m.n_free(), 6);
        let m11 = TriMesh::<f64>::with_default_boundary(11).unwrap();
        assert_eq!(m11.triangles().len(), 200);
        assert!((m11.h() - 0.1).abs() < 1e-15);
        assert!(TriMesh::<f64>::with_default_boundary(2).is_err());
        let total: f64 = (0..m11.triangles().len()).map(|t| m11.triangle_area(t)).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn node_classification() {
        let m = TriMesh::<f64>::with_default_boundary(5).unwrap();
        let mut counts = [0usize; 3];
        for (k, kind) in m.kinds().iter().enumerate() {
            let p = m.nodes()[k];
            let on_boundary = p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0;
            match kind {
                NodeKind::Interior => {
                    assert!(!on_boundary);
                    counts[0] += 1
                }
                NodeKind::Robin => {
                    assert!(on_boundary && p[0] != 0.0);
                    counts[1] += 1
                }
                NodeKind::Dirichlet => {
                    assert_eq!(p[0], 0.0);
                    counts[2] += 1
                }
            }
        }
        assert_eq!(counts, [9, 11, 5]);
        // right, bottom, top sides: 4 segments each
        assert_eq!(m.robin_edges().len(), 12);
    }

    #[test]
    fn laplacian_case_is_spd() {
        let mesh = TriMesh::<f64>::with_default_boundary(6).unwrap();
        let k = kle(2);
        let mm = assemble_mode(&mesh, &k, 0.0, 0, &AssemblyOptions::default()).unwrap();
        let d = mm.free.to_dense();
        assert!(d.iter().all(|v| v.im == 0.0));
        let re = d.map(|v| v.re);
        assert!((re.clone() - re.transpose()).norm() < 1e-12);
        assert!(re.cholesky().is_some());
    }

    #[test]
    fn robin_row_imaginary_part_is_edge_mass() {
        // Np = 3, c = 2: node (1, 0) lies on the bottom side with two Robin
        // segments of length 1/2; diagonal edge mass is 2 · (h/3) · ᾱ.
        let mesh = TriMesh::<f64>::with_default_boundary(3).unwrap();
        let k = kle(1);
        let c = 2.0;
        let mm = assemble_mode(&mesh, &k, c, 0, &AssemblyOptions::default()).unwrap();
        let node = 1; // (ix, iy) = (1, 0)
        let j = mesh.free_index(node).unwrap();
        let expect = c * 5.0 * 2.0 * (0.5 / 3.0);
        assert!((mm.free.get(j, j).im - expect).abs() < 1e-13);
        // the neighbour (2, 0) shares one segment: off-diagonal h/6
        let jn = mesh.free_index(2).unwrap();
        assert!((mm.free.get(j, jn).im - c * 5.0 * 0.5 / 6.0).abs() < 1e-13);
        // an interior node carries no boundary term
        let ji = mesh.free_index(4).unwrap();
        assert_eq!(mm.free.get(ji, ji).im, 0.0);
    }

    #[test]
    fn structural_properties() {
        let mesh = TriMesh::<f64>::with_default_boundary(7).unwrap();
        let k = kle(3);
        let c = 1.5 * PI;
        let mats = HelmholtzMatrices::assemble(&mesh, &k, c, &AssemblyOptions::default()).unwrap();
        for km in &mats.k {
            assert!(km.same_pattern(&mats.k[0]));
            assert!(km.values().iter().all(|v| v.re.is_finite() && v.im.is_finite()));
            assert!(km.symmetry_defect() < 1e-12);
        }
        // Robin part is purely imaginary and PSD
        let robin = mats.k0().to_dense().map(|v| v.im);
        let ev = robin.symmetric_eigenvalues();
        assert!(ev.iter().all(|&e| e >= -1e-12));
    }

    #[test]
    fn scaling_mean_and_std_doubles_every_matrix() {
        let mesh = TriMesh::<f64>::with_default_boundary(5).unwrap();
        let k1 = KlExpansion::new(2, 1.0, 1.0, 5.0).unwrap();
        let k2 = KlExpansion::new(2, 1.0, 2.0, 10.0).unwrap();
        let o = AssemblyOptions::default();
        let a = HelmholtzMatrices::assemble(&mesh, &k1, 2.0, &o).unwrap();
        let b = HelmholtzMatrices::assemble(&mesh, &k2, 2.0, &o).unwrap();
        for (x, y) in a.k.iter().zip(&b.k) {
            let diff = y.to_dense() - x.to_dense() * C::new(2.0, 0.0);
            assert!(diff.norm() < 1e-12 * x.to_dense().norm().max(1.0));
        }
    }

    #[test]
    fn load_vector_for_unit_source() {
        let mesh = TriMesh::<f64>::with_default_boundary(3).unwrap();
        let k = kle(1);
        let mats = HelmholtzMatrices::assemble(&mesh, &k, 0.0, &AssemblyOptions::default()).unwrap();
        let lv = assemble_rhs(&mesh, &mats, &|_| 1.0, &|_| 0.0, CoefficientQuadrature::MidEdge);
        for node in 0..mesh.nodes().len() {
            if let Some(j) = mesh.free_index(node) {
                let area: f64 = mesh
                    .triangles()
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.contains(&node))
                    .map(|(t, _)| mesh.triangle_area(t))
                    .sum();
                assert!((lv.f0[j].re - area / 3.0).abs() < 1e-15);
            }
        }
        assert_eq!(lv.lift.norm(), 0.0);

        let zero = assemble_rhs(&mesh, &mats, &|_| 0.0, &|_| 0.0, CoefficientQuadrature::MidEdge);
        assert_eq!(zero.spatial_rhs().norm(), 0.0);
        let data = assemble_rhs(&mesh, &mats, &|_| 0.0, &|_| 0.1, CoefficientQuadrature::MidEdge);
        assert_eq!(data.f0.norm(), 0.0);
        assert!(data.lift.norm() > 0.0);
    }

    #[test]
    fn spectrum_signs() {
        let mesh = TriMesh::<f64>::with_default_boundary(8).unwrap();
        let k = kle(1);
        let o = AssemblyOptions::default();
        let spd = HelmholtzMatrices::assemble(&mesh, &k, 0.0, &o).unwrap();
        let ev = spectrum(spd.k0(), DENSE_EIGEN_LIMIT).unwrap();
        assert!(ev.iter().all(|e| e.re > 0.0 && e.im.abs() < 1e-10));

        let indef = HelmholtzMatrices::assemble(&mesh, &k, 3.5 * PI, &o).unwrap();
        let ev = spectrum(indef.k0(), DENSE_EIGEN_LIMIT).unwrap();
        assert!(ev.iter().any(|e| e.re < 0.0));
        assert!(ev.iter().all(|e| e.im >= -1e-10));
        assert!(spectrum(indef.k0(), 3).is_err());

        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &ev[..2]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("re,im\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
