//! The two set-valued map families: linear-control `F(x) = Ax + BU` and
//! polyhedral `F(x) = {v : Ax - Ev <= d}`.
//!
//! For each map this module evaluates the Hamiltonian
//! `H_F(x, v*) = sup {<v, v*> : v ∈ F(x)}`, an argmaximum point, the function
//! `M_F(x*, v*) = inf {<x, x*> - <v, v*> : (x, v) ∈ gph F}` and the locally
//! adjoint mapping (LAM). The canonical LAM test is the Hamiltonian one:
//! `x* ∈ F*(v*; (x̃, ṽ))` iff `H_F(x, v*) - H_F(x̃, v*) <= <x*, x - x̃>` for
//! all `x`. The closed forms for each family are validated against it.

use crate::error::{check_len, Error, Result};
use crate::ext_real::ExtReal;
use crate::geometry::{combination_residual, support, support_with_point, Combination, Polytope};
use crate::linalg::{dot, norm_inf, sub, Matrix};
use crate::lp::{solve_lp, LinearProgram, LpStatus};

pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearControlMap {
    a: Matrix,
    b: Matrix,
    u: Polytope,
}

impl LinearControlMap {
    pub fn new(a: Matrix, b: Matrix, u: Polytope) -> Result<Self> {
        let n = a.rows();
        check_len("linear-control A columns", n, a.cols())?;
        check_len("linear-control B rows", n, b.rows())?;
        check_len("control set dimension", b.cols(), u.dim())?;
        if !a.all_finite() || !b.all_finite() {
            return Err(Error::NonFinite("linear-control map"));
        }
        if u.is_empty()? {
            return Err(Error::Invalid("control set U is empty".into()));
        }
        for i in 0..u.dim() {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; u.dim()];
                e[i] = s;
                if !support(&u, &e)?.is_finite() {
                    return Err(Error::Invalid("control set U is unbounded".into()));
                }
            }
        }
        Ok(LinearControlMap { a, b, u })
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn control_dim(&self) -> usize {
        self.b.cols()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn u(&self) -> &Polytope {
        &self.u
    }

    /// A control `u ∈ U` with `Bu = v - Ax`, and the sup-norm residual of the
    /// best such attempt.
    pub fn recover_control(&self, x: &[f64], v: &[f64]) -> Result<(Vec<f64>, f64)> {
        check_len("state", self.state_dim(), x.len())?;
        check_len("velocity", self.state_dim(), v.len())?;
        let target = sub(v, &self.a.mul_vec(x));
        let r = self.control_dim();
        let n = self.state_dim();
        // variables: u (r), t
        let mut c = vec![0.0; r + 1];
        c[r] = 1.0;
        let mut lp = LinearProgram::new(c);
        for i in 0..n {
            let mut row: Vec<f64> = self.b.row(i).to_vec();
            row.push(-1.0);
            lp.add_ub(&row, target[i])?;
            let mut neg: Vec<f64> = self.b.row(i).iter().map(|v| -v).collect();
            neg.push(-1.0);
            lp.add_ub(&neg, -target[i])?;
        }
        for (row, &d) in self.u.a().row_iter().zip(self.u.d()) {
            let mut full = row.to_vec();
            full.push(0.0);
            lp.add_ub(&full, d)?;
        }
        let sol = solve_lp(&lp)?;
        match sol.status {
            LpStatus::Optimal => Ok((sol.z[..r].to_vec(), sol.z[r].max(0.0))),
            other => Err(Error::NotOptimal(other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralMap {
    a: Matrix,
    e: Matrix,
    d: Vec<f64>,
}

impl PolyhedralMap {
    pub fn new(a: Matrix, e: Matrix, d: Vec<f64>) -> Result<Self> {
        check_len("polyhedral E rows", a.rows(), e.rows())?;
        check_len("polyhedral E columns", a.cols(), e.cols())?;
        check_len("polyhedral d", a.rows(), d.len())?;
        let map = PolyhedralMap { a, e, d };
        if map.graph().is_empty()? {
            return Err(Error::Invalid(
                "graph of the polyhedral map is empty".into(),
            ));
        }
        Ok(map)
    }

    pub fn state_dim(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn e(&self) -> &Matrix {
        &self.e
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// `gph F = {(x, v) : Ax - Ev <= d}` as a polytope in `R^{2n}`.
    pub fn graph(&self) -> Polytope {
        let n = self.state_dim();
        let rows: Vec<Vec<f64>> = (0..self.num_rows())
            .map(|i| {
                let mut r = self.a.row(i).to_vec();
                r.extend(self.e.row(i).iter().map(|v| -v));
                r
            })
            .collect();
        Polytope::from_rows(2 * n, &rows, self.d.clone()).expect("graph rows are consistent")
    }

    /// `F(x) = {v : -Ev <= d - Ax}`.
    pub fn image(&self, x: &[f64]) -> Result<Polytope> {
        check_len("state", self.state_dim(), x.len())?;
        let ax = self.a.mul_vec(x);
        let rows: Vec<Vec<f64>> = self
            .e
            .row_iter()
            .map(|r| r.iter().map(|v| -v).collect())
            .collect();
        let rhs = self.d.iter().zip(&ax).map(|(d, a)| d - a).collect();
        Polytope::from_rows(self.state_dim(), &rows, rhs)
    }

    /// `Ax - Ev - d`, nonpositive on the graph.
    pub fn graph_slack(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let ax = self.a.mul_vec(x);
        let ev = self.e.mul_vec(v);
        (0..self.num_rows())
            .map(|i| ax[i] - ev[i] - self.d[i])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetValuedMap {
    LinearControl(LinearControlMap),
    Polyhedral(PolyhedralMap),
}

impl SetValuedMap {
    pub fn state_dim(&self) -> usize {
        match self {
            SetValuedMap::LinearControl(m) => m.state_dim(),
            SetValuedMap::Polyhedral(m) => m.state_dim(),
        }
    }

    /// Sup-norm violation of `v ∈ F(x)`.
    pub fn membership_residual(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        check_len("state", self.state_dim(), x.len())?;
        check_len("velocity", self.state_dim(), v.len())?;
        match self {
            SetValuedMap::LinearControl(m) => Ok(m.recover_control(x, v)?.1),
            SetValuedMap::Polyhedral(m) => Ok(m.graph_slack(x, v).into_iter().fold(0.0, f64::max)),
        }
    }

    pub fn contains(&self, x: &[f64], v: &[f64], tol: f64) -> Result<bool> {
        Ok(self.membership_residual(x, v)? <= tol)
    }
}

impl From<LinearControlMap> for SetValuedMap {
    fn from(m: LinearControlMap) -> Self {
        SetValuedMap::LinearControl(m)
    }
}

impl From<PolyhedralMap> for SetValuedMap {
    fn from(m: PolyhedralMap) -> Self {
        SetValuedMap::Polyhedral(m)
    }
}

fn check_pair(f: &SetValuedMap, x: &[f64], v_star: &[f64]) -> Result<()> {
    check_len("state", f.state_dim(), x.len())?;
    check_len("adjoint velocity", f.state_dim(), v_star.len())
}

/// `H_F(x, v*)`; `-∞` when `F(x)` is empty, `+∞` when unbounded in `v*`.
pub fn hamiltonian(f: &SetValuedMap, x: &[f64], v_star: &[f64]) -> Result<ExtReal> {
    Ok(hamiltonian_with_point(f, x, v_star)?.0)
}

fn hamiltonian_with_point(
    f: &SetValuedMap,
    x: &[f64],
    v_star: &[f64],
) -> Result<(ExtReal, Option<Vec<f64>>)> {
    check_pair(f, x, v_star)?;
    match f {
        SetValuedMap::LinearControl(m) => {
            let ax = m.a.mul_vec(x);
            let (w, u) = support_with_point(&m.u, &m.b.tr_mul_vec(v_star))?;
            let value = w.try_add(ExtReal::Finite(dot(&ax, v_star)))?;
            let point = u.map(|u| {
                let bu = m.b.mul_vec(&u);
                ax.iter().zip(&bu).map(|(a, b)| a + b).collect()
            });
            Ok((value, point))
        }
        SetValuedMap::Polyhedral(m) => support_with_point(&m.image(x)?, v_star),
    }
}

/// One `v ∈ F_A(x; v*)`.
pub fn argmax_point(f: &SetValuedMap, x: &[f64], v_star: &[f64]) -> Result<Vec<f64>> {
    match hamiltonian_with_point(f, x, v_star)? {
        (ExtReal::Finite(_), Some(v)) => Ok(v),
        (value, _) => Err(Error::InfiniteHamiltonian {
            node: 0,
            value: value.to_string(),
        }),
    }
}

/// `H_F(x, v*) - <v, v*>`, zero exactly when `v ∈ F_A(x; v*)`.
pub fn argmax_residual(f: &SetValuedMap, x: &[f64], v: &[f64], v_star: &[f64]) -> Result<ExtReal> {
    argmax_residual_with(f, x, v, v_star, MEMBERSHIP_TOL)
}

pub fn argmax_residual_with(
    f: &SetValuedMap,
    x: &[f64],
    v: &[f64],
    v_star: &[f64],
    tol: f64,
) -> Result<ExtReal> {
    check_pair(f, x, v_star)?;
    let violation = f.membership_residual(x, v)?;
    if violation > tol {
        return Err(Error::NotMember(format!(
            "velocity outside F(x) by {violation:.3e}"
        )));
    }
    hamiltonian(f, x, v_star)?.try_sub(ExtReal::Finite(dot(v, v_star)))
}

/// Closed-form LAM of a linear-control map: `{Aᵀv*}` when the recovered
/// control satisfies the maximum principle for `v*`, empty otherwise.
pub fn lam_linear(
    f: &LinearControlMap,
    v_star: &[f64],
    x_tilde: &[f64],
    v_tilde: &[f64],
) -> Result<Option<Vec<f64>>> {
    lam_linear_with(f, v_star, x_tilde, v_tilde, MEMBERSHIP_TOL)
}

pub fn lam_linear_with(
    f: &LinearControlMap,
    v_star: &[f64],
    x_tilde: &[f64],
    v_tilde: &[f64],
    tol: f64,
) -> Result<Option<Vec<f64>>> {
    Ok(
        if max_principle_gap(f, v_star, x_tilde, v_tilde, tol)? <= tol {
            Some(f.a.tr_mul_vec(v_star))
        } else {
            None
        },
    )
}

/// `max_{u∈U} <Bu, v*> - <ṽ - Ax̃, v*>`. Independent of which control
/// realizes `ṽ`.
pub fn max_principle_gap(
    f: &LinearControlMap,
    v_star: &[f64],
    x_tilde: &[f64],
    v_tilde: &[f64],
    tol: f64,
) -> Result<f64> {
    check_len("adjoint velocity", f.state_dim(), v_star.len())?;
    let (_, residual) = f.recover_control(x_tilde, v_tilde)?;
    if residual > tol {
        return Err(Error::NotMember(format!(
            "no control in U realizes the velocity (residual {residual:.3e})"
        )));
    }
    let bu = sub(v_tilde, &f.a.mul_vec(x_tilde));
    let w = support(&f.u, &f.b.tr_mul_vec(v_star))?
        .finite()
        .expect("U is bounded and nonempty");
    Ok(w - dot(&bu, v_star))
}

/// Canonical LAM membership through Hamiltonian monotonicity, computed as one
/// LP: `sup_{(x,v) ∈ gph F} <v, v*> - <x, x*>` must not exceed
/// `H_F(x̃, v*) - <x*, x̃>`.
pub fn lam_membership_via_hamiltonian(
    f: &SetValuedMap,
    v_star: &[f64],
    x_tilde: &[f64],
    v_tilde: &[f64],
    x_star: &[f64],
    tol: f64,
) -> Result<bool> {
    Ok(lam_hamiltonian_gap(f, v_star, x_tilde, v_tilde, x_star, tol)? <= ExtReal::Finite(tol))
}

/// `sup_x {H_F(x, v*) - <x*, x>} - (H_F(x̃, v*) - <x*, x̃>)`, nonnegative.
pub fn lam_hamiltonian_gap(
    f: &SetValuedMap,
    v_star: &[f64],
    x_tilde: &[f64],
    v_tilde: &[f64],
    x_star: &[f64],
    tol: f64,
) -> Result<ExtReal> {
    check_len("LAM candidate", f.state_dim(), x_star.len())?;
    let gap = argmax_residual_with(f, x_tilde, v_tilde, v_star, tol)?;
    if gap > ExtReal::Finite(tol) {
        return Err(Error::NotMember(format!(
            "velocity is not in the argmaximum set (gap {gap})"
        )));
    }
    let at_tilde =
        hamiltonian(f, x_tilde, v_star)?.try_sub(ExtReal::Finite(dot(x_star, x_tilde)))?;
    let sup = -m_function(f, x_star, v_star)?;
    sup.try_sub(at_tilde)
}

/// Farkas description of the polyhedral LAM at `(x̃, ṽ)`:
/// `x* ∈ F*(v*)` iff `x* = -Aᵀλ, -v* = Eᵀλ` for some `λ >= 0` supported on the
/// rows active at `(x̃, ṽ)`.
#[derive(Debug, Clone)]
pub struct PolyhedralLam {
    /// Columns `(-A_i, E_i)` for the active rows.
    generators: Vec<Vec<f64>>,
    v_star: Vec<f64>,
    tol: f64,
}

impl PolyhedralLam {
    pub fn active_rows(&self) -> usize {
        self.generators.len()
    }

    /// Sup-norm distance from `(x*, -v*)` to the cone of admissible pairs.
    pub fn residual(&self, x_star: &[f64]) -> Result<f64> {
        let n = self.v_star.len();
        check_len("LAM candidate", n, x_star.len())?;
        let mut target = x_star.to_vec();
        target.extend(self.v_star.iter().map(|v| -v));
        combination_residual(&self.generators, &target, Combination::Conic)
    }

    pub fn contains(&self, x_star: &[f64]) -> Result<bool> {
        Ok(self.residual(x_star)? <= self.tol)
    }
}

pub fn lam_polyhedral_members(
    f: &PolyhedralMap,
    v_star: &[f64],
    x_tilde: &[f64],
    v_tilde: &[f64],
    tol: f64,
) -> Result<PolyhedralLam> {
    check_len("adjoint velocity", f.state_dim(), v_star.len())?;
    check_len("state", f.state_dim(), x_tilde.len())?;
    check_len("velocity", f.state_dim(), v_tilde.len())?;
    let slack = f.graph_slack(x_tilde, v_tilde);
    let worst = slack.iter().cloned().fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::NotMember(format!(
            "point outside gph F by {worst:.3e}"
        )));
    }
    let generators = slack
        .iter()
        .enumerate()
        .filter(|(_, s)| s.abs() <= tol)
        .map(|(i, _)| {
            let mut g: Vec<f64> = f.a.row(i).iter().map(|v| -v).collect();
            g.extend_from_slice(f.e.row(i));
            g
        })
        .collect();
    Ok(PolyhedralLam {
        generators,
        v_star: v_star.to_vec(),
        tol,
    })
}

/// `M_F(x*, v*) = inf {<x, x*> - <v, v*> : (x, v) ∈ gph F}` via LP.
pub fn m_function(f: &SetValuedMap, x_star: &[f64], v_star: &[f64]) -> Result<ExtReal> {
    Ok(m_function_with_multiplier(f, x_star, v_star)?.0)
}

/// `M_F` together with, for polyhedral maps, the multiplier `λ >= 0` of the
/// graph rows (`x* = -Aᵀλ`, `v* = -Eᵀλ`, `M_F = -<d, λ>`).
pub fn m_function_with_multiplier(
    f: &SetValuedMap,
    x_star: &[f64],
    v_star: &[f64],
) -> Result<(ExtReal, Option<Vec<f64>>)> {
    check_pair(f, x_star, v_star)?;
    let n = f.state_dim();
    match f {
        SetValuedMap::LinearControl(m) => {
            // variables (x, u): <x, x* - Aᵀv*> - <u, Bᵀv*>, u ∈ U
            let r = m.control_dim();
            let atv = m.a.tr_mul_vec(v_star);
            let btv = m.b.tr_mul_vec(v_star);
            let mut c: Vec<f64> = x_star.iter().zip(&atv).map(|(a, b)| a - b).collect();
            c.extend(btv.iter().map(|v| -v));
            let mut lp = LinearProgram::new(c);
            for (row, &d) in m.u.a().row_iter().zip(m.u.d()) {
                let mut full = vec![0.0; n];
                full.extend_from_slice(row);
                lp.add_ub(&full, d)?;
            }
            debug_assert_eq!(lp.num_vars(), n + r);
            let sol = solve_lp(&lp)?;
            Ok((sol.value, None))
        }
        SetValuedMap::Polyhedral(m) => {
            let mut c = x_star.to_vec();
            c.extend(v_star.iter().map(|v| -v));
            let mut lp = LinearProgram::new(c);
            let graph = m.graph();
            lp.a_ub = graph.a().clone();
            lp.b_ub = graph.d().to_vec();
            let sol = solve_lp(&lp)?;
            let lambda = sol.is_optimal().then(|| sol.y_ub.clone());
            Ok((sol.value, lambda))
        }
    }
}

/// Closed form for linear-control maps: `-W_U(Bᵀv*)` if `x* = Aᵀv*`
/// (within `tol`), `-∞` otherwise.
pub fn m_function_closed_form(
    f: &LinearControlMap,
    x_star: &[f64],
    v_star: &[f64],
    tol: f64,
) -> Result<ExtReal> {
    check_len("M_F argument", f.state_dim(), x_star.len())?;
    check_len("M_F argument", f.state_dim(), v_star.len())?;
    if norm_inf(&sub(x_star, &f.a.tr_mul_vec(v_star))) > tol {
        return Ok(ExtReal::NegInf);
    }
    Ok(-support(&f.u, &f.b.tr_mul_vec(v_star))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1(v: f64) -> Matrix {
        Matrix::from_rows(1, &[vec![v]]).unwrap()
    }

    fn unit_interval() -> Polytope {
        Polytope::cube(1, -1.0, 1.0)
    }

    fn lc(a: f64, b: f64) -> LinearControlMap {
        LinearControlMap::new(m1(a), m1(b), unit_interval()).unwrap()
    }

    fn half_line(d: f64) -> PolyhedralMap {
        // F(x) = {v : x - v <= d} = [x - d, ∞)
        PolyhedralMap::new(m1(1.0), m1(1.0), vec![d]).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let f: SetValuedMap = lc(0.0, 1.0).into();
        assert_eq!(
            hamiltonian(&f, &[5.0], &[2.0]).unwrap(),
            ExtReal::Finite(2.0)
        );
        let singleton: SetValuedMap =
            LinearControlMap::new(Matrix::identity(2), Matrix::zeros(2, 1), unit_interval())
                .unwrap()
                .into();
        assert_eq!(
            hamiltonian(&singleton, &[1.0, 2.0], &[3.0, 4.0]).unwrap(),
            ExtReal::Finite(11.0)
        );
        let p: SetValuedMap = half_line(0.0).into();
        assert_eq!(
            hamiltonian(&p, &[2.0], &[-1.0]).unwrap(),
            ExtReal::Finite(-2.0)
        );
        assert_eq!(hamiltonian(&p, &[2.0], &[1.0]).unwrap(), ExtReal::PosInf);
    }

    #[test]
    fn empty_image_has_minus_infinite_hamiltonian() {
        // F(x) = {v : x <= 0, v <= 1}: empty for x > 0
        let a = Matrix::from_rows(1, &[vec![1.0], vec![0.0]]).unwrap();
        let e = Matrix::from_rows(1, &[vec![0.0], vec![-1.0]]).unwrap();
        let f: SetValuedMap = PolyhedralMap::new(a, e, vec![0.0, 1.0]).unwrap().into();
        assert_eq!(hamiltonian(&f, &[1.0], &[1.0]).unwrap(), ExtReal::NegInf);
    }

    #[test]
    fn argmax_examples() {
        let f: SetValuedMap = lc(0.0, 1.0).into();
        assert_eq!(argmax_point(&f, &[0.0], &[3.0]).unwrap(), vec![1.0]);
        let frozen: SetValuedMap = lc(2.0, 0.0).into();
        assert_eq!(argmax_point(&frozen, &[1.5], &[-7.0]).unwrap(), vec![3.0]);
        let p: SetValuedMap = half_line(0.0).into();
        assert_eq!(argmax_point(&p, &[2.0], &[-1.0]).unwrap(), vec![2.0]);
        assert!(matches!(
            argmax_point(&p, &[2.0], &[1.0]),
            Err(Error::InfiniteHamiltonian { .. })
        ));
    }

    #[test]
    fn argmax_residual_examples() {
        let f: SetValuedMap = lc(0.0, 1.0).into();
        assert_eq!(
            argmax_residual(&f, &[0.0], &[1.0], &[3.0]).unwrap(),
            ExtReal::Finite(0.0)
        );
        assert_eq!(
            argmax_residual(&f, &[0.0], &[0.0], &[3.0]).unwrap(),
            ExtReal::Finite(3.0)
        );
        assert!(matches!(
            argmax_residual(&f, &[0.0], &[2.0], &[3.0]),
            Err(Error::NotMember(_))
        ));
    }

    #[test]
    fn lam_linear_examples() {
        let f = lc(0.0, 1.0);
        assert_eq!(
            lam_linear(&f, &[2.0], &[0.0], &[1.0]).unwrap(),
            Some(vec![0.0])
        );
        assert_eq!(lam_linear(&f, &[2.0], &[0.0], &[0.0]).unwrap(), None);
        let g = lc(2.0, 1.0);
        assert_eq!(lam_linear(&g, &[-1.0], &[1.0], &[3.0]).unwrap(), None);
        assert_eq!(
            lam_linear(&g, &[1.0], &[1.0], &[3.0]).unwrap(),
            Some(vec![2.0])
        );
        assert!(matches!(
            lam_linear(&f, &[1.0], &[0.0], &[5.0]),
            Err(Error::NotMember(_))
        ));
    }

    #[test]
    fn lam_linear_agrees_with_hamiltonian_on_a_grid() {
        let g = lc(2.0, 1.0);
        let f: SetValuedMap = g.clone().into();
        for v_star in [-1.0, 1.0] {
            let closed = lam_linear(&g, &[v_star], &[1.0], &[3.0]).unwrap();
            if gap_ok(&f, v_star) {
                for k in -40..=40 {
                    let x_star = 0.1 * k as f64;
                    let canonical = lam_membership_via_hamiltonian(
                        &f,
                        &[v_star],
                        &[1.0],
                        &[3.0],
                        &[x_star],
                        1e-9,
                    )
                    .unwrap();
                    let closed_member = closed
                        .as_ref()
                        .is_some_and(|c| (c[0] - x_star).abs() < 1e-9);
                    assert_eq!(canonical, closed_member, "v*={v_star}, x*={x_star}");
                }
            } else {
                assert!(closed.is_none());
            }
        }
    }

    fn gap_ok(f: &SetValuedMap, v_star: f64) -> bool {
        argmax_residual(f, &[1.0], &[3.0], &[v_star]).unwrap() <= ExtReal::Finite(1e-9)
    }

    #[test]
    fn lam_via_hamiltonian_examples() {
        let p: SetValuedMap = half_line(0.0).into();
        assert!(
            lam_membership_via_hamiltonian(&p, &[-1.0], &[0.0], &[0.0], &[-1.0], 1e-9).unwrap()
        );
        assert!(
            !lam_membership_via_hamiltonian(&p, &[-1.0], &[0.0], &[0.0], &[1.0], 1e-9).unwrap()
        );
        let frozen: SetValuedMap =
            LinearControlMap::new(m1(2.0), m1(0.0), Polytope::cube(1, 0.0, 0.0))
                .unwrap()
                .into();
        assert!(
            lam_membership_via_hamiltonian(&frozen, &[1.0], &[0.7], &[1.4], &[2.0], 1e-9).unwrap()
        );
        // precondition: ṽ must be an argmaximum
        assert!(
            lam_membership_via_hamiltonian(&p, &[-1.0], &[0.0], &[1.0], &[-1.0], 1e-9).is_err()
        );
    }

    #[test]
    fn lam_polyhedral_examples() {
        let f = half_line(0.0);
        let lam = lam_polyhedral_members(&f, &[-1.0], &[0.0], &[0.0], 1e-9).unwrap();
        assert!(lam.contains(&[-1.0]).unwrap());
        assert!(!lam.contains(&[0.0]).unwrap());
        let lam = lam_polyhedral_members(&f, &[1.0], &[0.0], &[0.0], 1e-9).unwrap();
        for x_star in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            assert!(!lam.contains(&[x_star]).unwrap());
        }
        let inner = lam_polyhedral_members(&f, &[0.0], &[0.0], &[5.0], 1e-9).unwrap();
        assert_eq!(inner.active_rows(), 0);
        assert!(inner.contains(&[0.0]).unwrap());
        assert!(!inner.contains(&[0.5]).unwrap());
        assert!(lam_polyhedral_members(&f, &[0.0], &[1.0], &[0.0], 1e-9).is_err());
    }

    #[test]
    fn m_function_examples() {
        let f: SetValuedMap = lc(0.0, 1.0).into();
        assert_eq!(
            m_function(&f, &[0.0], &[2.0]).unwrap(),
            ExtReal::Finite(-2.0)
        );
        assert_eq!(m_function(&f, &[1.0], &[2.0]).unwrap(), ExtReal::NegInf);
        assert_eq!(
            m_function_closed_form(&lc(0.0, 1.0), &[0.0], &[2.0], 1e-12).unwrap(),
            ExtReal::Finite(-2.0)
        );
        assert_eq!(
            m_function_closed_form(&lc(0.0, 1.0), &[1.0], &[2.0], 1e-12).unwrap(),
            ExtReal::NegInf
        );

        let p: SetValuedMap = half_line(0.0).into();
        let (value, lambda) = m_function_with_multiplier(&p, &[-1.0], &[-1.0]).unwrap();
        assert_eq!(value, ExtReal::Finite(0.0));
        assert!((lambda.unwrap()[0] - 1.0).abs() < 1e-12);
        let p1: SetValuedMap = half_line(1.0).into();
        assert_eq!(
            m_function(&p1, &[-1.0], &[-1.0]).unwrap(),
            ExtReal::Finite(-1.0)
        );
    }

    #[test]
    fn unbounded_control_set_is_rejected() {
        let u = Polytope::from_rows(1, &[vec![1.0]], vec![1.0]).unwrap();
        assert!(LinearControlMap::new(m1(0.0), m1(1.0), u).is_err());
    }
}
