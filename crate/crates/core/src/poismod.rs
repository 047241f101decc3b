//! Holomorphic Poisson bivectors and Poisson modules.

use rayon::prelude::*;

use crate::coeffs::{Chart, Polynomial, RationalFn};
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::gcs::{EbarSection, GCStructure};
use crate::gtangent::{apply_vector, GVector};
pub use crate::verdict::Verdict;

/// `sigma = sum_{i<j} sigma^{ij} d/dz_i ^ d/dz_j` with holomorphic
/// polynomial coefficients, stored as a full antisymmetric matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PoissonBivector {
    chart: Chart,
    sigma: Vec<Vec<Polynomial>>,
}

impl PoissonBivector {
    pub fn new(chart: Chart, sigma: Vec<Vec<Polynomial>>) -> Result<Self> {
        let n = chart.n;
        if chart.fiber || sigma.len() != n || sigma.iter().any(|r| r.len() != n) {
            return Err(Error::ChartMismatch(format!("bivector matrix must be {n}x{n} on a base chart")));
        }
        for i in 0..n {
            for j in 0..n {
                if sigma[i][j] != -&sigma[j][i] {
                    return Err(Error::Precondition(format!(
                        "bivector matrix is not antisymmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                if !sigma[i][j].is_holomorphic() {
                    return Err(Error::NotHolomorphic(format!("sigma^{}{} = {}", i + 1, j + 1, sigma[i][j])));
                }
            }
        }
        Ok(PoissonBivector { chart, sigma })
    }

    /// Builds the bivector from its upper-triangular entries
    /// `[(i, j, sigma^{ij})]` with `i < j`, zero based.
    pub fn from_upper(chart: Chart, entries: &[(usize, usize, Polynomial)]) -> Result<Self> {
        let n = chart.n;
        let mut m = vec![vec![Polynomial::zero(chart); n]; n];
        for (i, j, p) in entries {
            if i >= j || *j >= n {
                return Err(Error::Precondition(format!(
                    "bivector entry ({}, {}) is not above the diagonal",
                    i + 1,
                    j + 1
                )));
            }
            m[*i][*j] = &m[*i][*j] + p;
            m[*j][*i] = -&m[*i][*j];
        }
        Self::new(chart, m)
    }

    /// The surface bivector `f d/dz1 ^ d/dz2`.
    pub fn surface(f: Polynomial) -> Result<Self> {
        let chart = f.chart();
        Self::from_upper(chart, &[(0, 1, f)])
    }

    /// The normal form `z1 d/dz1 ^ d/dz2` on `C^2`.
    pub fn normal_form() -> Self {
        let c = Chart::new(2);
        Self::surface(Polynomial::var(c, 0)).expect("normal form is valid")
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.sigma[i][j]
    }

    /// `sigma(alpha) = i_alpha sigma`, with
    /// `i_alpha(X ^ Y) = alpha(X) Y - alpha(Y) X`; only the `(1,0)` part of
    /// `alpha` contributes. Returned as generator-indexed vector components.
    pub fn apply(&self, alpha: &Form) -> Vec<RationalFn> {
        let chart = self.chart;
        let n = chart.n;
        let mut out = vec![RationalFn::zero(chart); chart.nvars()];
        for i in 0..n {
            let a = alpha.coeff(1 << i);
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate().take(n) {
                let s = &self.sigma[i][j];
                if !s.is_zero() {
                    *o = &*o + &(&a * &RationalFn::from(s.clone()));
                }
            }
        }
        out
    }

    /// Conjugate bivector applied to `alpha`: `conj(sigma)(alpha)`, whose
    /// output lives in the antiholomorphic directions.
    pub fn apply_conjugate(&self, alpha: &Form) -> Vec<RationalFn> {
        let chart = self.chart;
        let n = chart.n;
        let mut out = vec![RationalFn::zero(chart); chart.nvars()];
        for i in 0..n {
            let a = alpha.coeff(1 << (n + i));
            if a.is_zero() {
                continue;
            }
            for j in 0..n {
                let s = &self.sigma[i][j];
                if !s.is_zero() {
                    out[n + j] = &out[n + j] + &(&a * &RationalFn::from(s.conjugate()));
                }
            }
        }
        out
    }

    /// Hamiltonian vector field `X_f = sigma(df)`.
    pub fn hamiltonian(&self, f: &RationalFn) -> Vec<RationalFn> {
        self.apply(&Form::scalar(f.clone()).ext_d())
    }

    /// `{f, g} = sigma(df, dg) = X_f(g)`.
    pub fn bracket(&self, f: &RationalFn, g: &RationalFn) -> RationalFn {
        let n = self.chart.n;
        let mut acc = RationalFn::zero(self.chart);
        for i in 0..n {
            let fi = f.derive(2 * i);
            if fi.is_zero() {
                continue;
            }
            for j in 0..n {
                let s = &self.sigma[i][j];
                if s.is_zero() {
                    continue;
                }
                let gj = g.derive(2 * j);
                if !gj.is_zero() {
                    acc = &acc + &(&(&fi * &gj) * &RationalFn::from(s.clone()));
                }
            }
        }
        acc
    }

    /// Contraction `i_sigma = sum_{i<j} sigma^{ij} i_{d/dz_j} i_{d/dz_i}`.
    pub fn contract(&self, a: &Form) -> Form {
        let n = self.chart.n;
        let mut out = Form::zero(self.chart);
        for i in 0..n {
            for j in i + 1..n {
                let s = &self.sigma[i][j];
                if !s.is_zero() {
                    out = &out + &a.interior_gen(i).interior_gen(j).scale(&s.clone().into());
                }
            }
        }
        out
    }

    /// `exp(i_sigma)(dz1 ^ ... ^ dzn)`.
    pub fn spinor(&self) -> Form {
        let chart = self.chart;
        let hol = Form::basis((1u32 << chart.n) - 1, RationalFn::one(chart));
        let mut acc = hol.clone();
        let mut term = hol;
        let mut k = 1i64;
        loop {
            term = self.contract(&term).scale_c(&crate::coeffs::GaussianRational::from_ratio(1, k));
            if term.is_zero() {
                return acc;
            }
            acc = &acc + &term;
            k += 1;
        }
    }
}

/// Canonical text `coeff*e1^e2+...` over the pairs `i < j`.
impl std::fmt::Display for PoissonBivector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.chart.n;
        let mut parts = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let c: RationalFn = self.sigma[i][j].clone().into();
                if !c.is_zero() {
                    parts.push(c.render_times(&format!("{}^{}", self.chart.vec_name(i), self.chart.vec_name(j))));
                }
            }
        }
        write!(f, "{}", crate::coeffs::poly::join_terms(parts))
    }
}

/// Holomorphic monomials `z^a` of total degree `1..=bound` on the base
/// chart, in a fixed order.
pub fn holomorphic_monomials(chart: Chart, bound: u32) -> Vec<Polynomial> {
    let n = chart.n;
    let mut out = Vec::new();
    let mut exps = vec![0u16; n];
    fn rec(chart: Chart, i: usize, left: u32, exps: &mut Vec<u16>, out: &mut Vec<Polynomial>) {
        if i == exps.len() {
            if exps.iter().any(|&e| e > 0) {
                let mut full: crate::coeffs::Exponents = std::iter::repeat_n(0, chart.nvars()).collect();
                for (k, e) in exps.iter().enumerate() {
                    full[2 * k] = *e;
                }
                out.push(Polynomial::monomial(chart, full, crate::coeffs::GaussianRational::from_int(1)));
            }
            return;
        }
        for e in 0..=left {
            exps[i] = e as u16;
            rec(chart, i + 1, left - e, exps, out);
        }
        exps[i] = 0;
    }
    rec(chart, 0, bound, &mut exps, &mut out);
    out.sort_by(|a, b| crate::coeffs::poly::glex_cmp(&a.terms()[0].0, &b.terms()[0].0));
    out
}

/// Verifies `{f,{g,h}} + {g,{h,f}} + {h,{f,g}} = 0` for all holomorphic
/// monomial triples of degree at most `bound`.
pub fn jacobi_check(sigma: &PoissonBivector, bound: u32) -> Result<()> {
    let mons: Vec<RationalFn> = holomorphic_monomials(sigma.chart(), bound).into_iter().map(Into::into).collect();
    for (a, f) in mons.iter().enumerate() {
        for (b, g) in mons.iter().enumerate().skip(a + 1) {
            let fg = sigma.bracket(f, g);
            for h in mons.iter().skip(b + 1) {
                let j = &(&sigma.bracket(f, &sigma.bracket(g, h)) + &sigma.bracket(g, &sigma.bracket(h, f)))
                    + &sigma.bracket(h, &fg);
                if !j.is_zero() {
                    return Err(Error::JacobiFail(format!("Jacobiator of ({f}, {g}, {h}) is {j}")));
                }
            }
        }
    }
    Ok(())
}

/// Matrix `A` of holomorphic vector fields with `D s_i = sum_j s_j (x) A_ji`.
/// Each entry is stored by generator-indexed components (only the
/// holomorphic slots are nonzero).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConnectionMatrix {
    chart: Chart,
    entries: Vec<Vec<Vec<RationalFn>>>,
}

impl ConnectionMatrix {
    pub fn new(chart: Chart, entries: Vec<Vec<Vec<RationalFn>>>) -> Result<Self> {
        let r = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != r {
                return Err(Error::Precondition("connection matrix must be square".into()));
            }
            for (j, v) in row.iter().enumerate() {
                if v.len() != chart.nvars() {
                    return Err(Error::ChartMismatch(format!("entry ({}, {}) has the wrong length", i + 1, j + 1)));
                }
                for (g, c) in v.iter().enumerate() {
                    let ok = c.is_zero() || (chart.gen_is_holomorphic(g) && c.is_polynomial() && c.is_holomorphic());
                    if !ok {
                        return Err(Error::NotHolomorphic(format!(
                            "entry ({}, {}) = {}",
                            i + 1,
                            j + 1,
                            field_text(chart, v)
                        )));
                    }
                }
            }
        }
        Ok(ConnectionMatrix { chart, entries })
    }

    pub fn zero(chart: Chart, r: usize) -> Self {
        ConnectionMatrix { chart, entries: vec![vec![vec![RationalFn::zero(chart); chart.nvars()]; r]; r] }
    }

    /// Rank-1 connection given by one vector field.
    pub fn rank_one(chart: Chart, field: Vec<RationalFn>) -> Result<Self> {
        Self::new(chart, vec![vec![field]])
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &[RationalFn] {
        &self.entries[i][j]
    }

    /// `{f, s_i} = sum_j A_ji(f) s_j`, as a coefficient vector.
    fn act_on_frame(&self, f: &RationalFn, i: usize) -> Vec<RationalFn> {
        (0..self.rank()).map(|j| apply_vector(self.chart, &self.entries[j][i], f)).collect()
    }

    /// `{f, sum_i c_i s_i} = sum_i ({f, c_i} s_i + c_i {f, s_i})`.
    pub fn act(&self, sigma: &PoissonBivector, f: &RationalFn, s: &[RationalFn]) -> Vec<RationalFn> {
        let r = self.rank();
        let mut out: Vec<RationalFn> = s.iter().map(|c| sigma.bracket(f, c)).collect();
        for (i, c) in s.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = self.act_on_frame(f, i);
            for j in 0..r {
                if !a[j].is_zero() {
                    out[j] = &out[j] + &(c * &a[j]);
                }
            }
        }
        out
    }

    /// Trace connection, the induced module structure on the top exterior
    /// power.
    pub fn trace(&self) -> ConnectionMatrix {
        let mut acc = vec![RationalFn::zero(self.chart); self.chart.nvars()];
        for i in 0..self.rank() {
            for (g, c) in self.entries[i][i].iter().enumerate() {
                acc[g] = &acc[g] + c;
            }
        }
        ConnectionMatrix { chart: self.chart, entries: vec![vec![acc]] }
    }

    /// Entrywise sum.
    pub fn plus(&self, o: &ConnectionMatrix) -> ConnectionMatrix {
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect())
            .collect();
        ConnectionMatrix { chart: self.chart, entries }
    }
}

fn field_text(chart: Chart, v: &[RationalFn]) -> String {
    crate::gtangent::GVector::from_vector(chart, v.to_vec()).vec_text()
}

/// Canonical text `[[a11,a12],[a21,a22]]` with vector fields in the
/// `e1, e2` notation.
impl std::fmt::Display for ConnectionMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|row| format!("[{}]", row.iter().map(|v| field_text(self.chart, v)).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Checks `{{f,g},s_i} = {f,{g,s_i}} - {g,{f,s_i}}` for all holomorphic
/// monomials `f, g` of degree at most `max(2, bound)`.
pub fn module_check(sigma: &PoissonBivector, a: &ConnectionMatrix, bound: u32) -> Verdict {
    let mons: Vec<RationalFn> =
        holomorphic_monomials(sigma.chart(), bound.max(2)).into_iter().map(Into::into).collect();
    let r = a.rank();
    let cases: Vec<(usize, usize)> = (0..mons.len()).flat_map(|x| (0..mons.len()).map(move |y| (x, y))).collect();
    let failures: Vec<Option<String>> = cases
        .par_iter()
        .map(|&(x, y)| {
            let (f, g) = (&mons[x], &mons[y]);
            let fg = sigma.bracket(f, g);
            for i in 0..r {
                let mut s = vec![RationalFn::zero(sigma.chart()); r];
                s[i] = RationalFn::one(sigma.chart());
                let lhs = a.act(sigma, &fg, &s);
                let gs = a.act(sigma, g, &s);
                let fs = a.act(sigma, f, &s);
                let f_gs = a.act(sigma, f, &gs);
                let g_fs = a.act(sigma, g, &fs);
                let ok = (0..r).all(|k| (&(&f_gs[k] - &g_fs[k]) - &lhs[k]).is_zero());
                if !ok {
                    return Some(format!("f = {f}, g = {g}, s_{}", i + 1));
                }
            }
            None
        })
        .collect();
    match failures.into_iter().flatten().next() {
        Some(w) => Verdict::fail(w),
        None => Verdict::pass(),
    }
}

/// Result of the two-section construction.
#[derive(Clone, Debug)]
pub struct SectionModule {
    pub sigma: PoissonBivector,
    pub connection: ConnectionMatrix,
    /// `sigma(dP) adj(P)` before division by `det P`.
    pub numerator: Vec<Vec<Vec<Polynomial>>>,
    pub det: Polynomial,
}

/// From a 2x2 holomorphic matrix `P` of sections `s_i = sum_j P_ji u_j`:
/// `sigma = det(P) d1 ^ d2` and `A = sigma(dP) adj(P) / det(P)`, so that
/// `D s_i = 0` with `D(g s) = -sigma(dg) s + g D s`.
pub fn from_sections(p: &[Vec<Polynomial>]) -> Result<SectionModule> {
    if p.len() != 2 || p.iter().any(|r| r.len() != 2) {
        return Err(Error::Precondition("P must be 2x2".into()));
    }
    let chart = p[0][0].chart();
    if chart.n != 2 || chart.fiber {
        return Err(Error::UnsupportedChart(chart.to_string()));
    }
    for row in p {
        for e in row {
            if !e.is_holomorphic() {
                return Err(Error::NotHolomorphic(e.to_string()));
            }
        }
    }
    let det = &(&p[0][0] * &p[1][1]) - &(&p[0][1] * &p[1][0]);
    if det.is_zero() {
        return Err(Error::SingularP);
    }
    let sigma = PoissonBivector::surface(det.clone())?;
    let adj = [[p[1][1].clone(), -&p[0][1]], [-&p[1][0], p[0][0].clone()]];
    let sig_dp: Vec<Vec<Vec<RationalFn>>> =
        p.iter().map(|row| row.iter().map(|e| sigma.hamiltonian(&e.clone().into())).collect()).collect();
    let nv = chart.nvars();
    let mut numerator = vec![vec![vec![Polynomial::zero(chart); nv]; 2]; 2];
    let mut entries = vec![vec![vec![RationalFn::zero(chart); nv]; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            for g in 0..nv {
                let mut acc = Polynomial::zero(chart);
                for j in 0..2 {
                    let c = sig_dp[i][j][g].as_polynomial().expect("hamiltonian of a polynomial is polynomial");
                    acc = &acc + &(c * &adj[j][k]);
                }
                let q = acc.div_exact(&det).map_err(|_| {
                    Error::NotDivisible(format!("internal: det P does not divide entry ({}, {})", i + 1, k + 1))
                })?;
                numerator[i][k][g] = acc;
                entries[i][k][g] = q.into();
            }
        }
    }
    let connection = ConnectionMatrix::new(chart, entries)?;
    let out = SectionModule { sigma, connection, numerator, det };
    let residual = sections_residual(p, &out.sigma, &out.connection);
    if residual.iter().any(|row| row.iter().any(|v| v.iter().any(|c| !c.is_zero()))) {
        return Err(Error::Precondition("internal: D s_i does not vanish".into()));
    }
    Ok(out)
}

/// Coefficients of `u_k` in `D s_i`:
/// `-sigma(dP_ki) + sum_j A_kj P_ji`, one vector field per `(k, i)`.
pub fn sections_residual(
    p: &[Vec<Polynomial>],
    sigma: &PoissonBivector,
    a: &ConnectionMatrix,
) -> Vec<Vec<Vec<RationalFn>>> {
    let chart = sigma.chart();
    let nv = chart.nvars();
    let r = p.len();
    let mut out = vec![vec![vec![RationalFn::zero(chart); nv]; r]; r];
    for k in 0..r {
        for i in 0..r {
            let h = sigma.hamiltonian(&p[k][i].clone().into());
            for g in 0..nv {
                let mut acc = -&h[g];
                for j in 0..r {
                    let pij: RationalFn = p[j][i].clone().into();
                    acc = &acc + &(&a.entry(k, j)[g] * &pij);
                }
                out[k][i][g] = acc;
            }
        }
    }
    out
}

/// Rank-1 module structure on `K = dz1 ^ ... ^ dzn`:
/// `Y = sum_i (sum_j d sigma^{ij} / dz_j) d/dz_i`, so that
/// `L_{X_f}(dz1 ^ ... ^ dzn) = Y(f) dz1 ^ ... ^ dzn`.
pub fn canonical_module(sigma: &PoissonBivector) -> ConnectionMatrix {
    let chart = sigma.chart();
    let n = chart.n;
    let mut y = vec![RationalFn::zero(chart); chart.nvars()];
    for (i, yi) in y.iter_mut().enumerate().take(n) {
        let mut acc = Polynomial::zero(chart);
        for j in 0..n {
            acc = &acc + &sigma.entry(i, j).derive(2 * j);
        }
        *yi = acc.into();
    }
    ConnectionMatrix::rank_one(chart, y).expect("divergence of a holomorphic bivector is holomorphic")
}

/// Compares `<Ds, df> = Y(f) s` with the Lie-derivative oracle
/// `L_{X_f}(dz1 ^ ... ^ dzn)` for every holomorphic monomial `f` of degree
/// at most `bound`; by linearity this covers a generic polynomial.
pub fn canonical_module_check(sigma: &PoissonBivector, bound: u32) -> Verdict {
    let chart = sigma.chart();
    let a = canonical_module(sigma);
    let vol = Form::basis((1u32 << chart.n) - 1, RationalFn::one(chart));
    for f in holomorphic_monomials(chart, bound) {
        let f: RationalFn = f.into();
        let x = sigma.hamiltonian(&f);
        let lie = crate::gtangent::lie_derivative_along(&x, &vol);
        let expect = vol.scale(&apply_vector(chart, a.entry(0, 0), &f));
        if lie != expect {
            return Verdict::fail(format!("f = {f}: L_X s = {lie}, <Ds, df> = {expect}"));
        }
    }
    Verdict::pass()
}

/// Matrix of `conj(E)` sections defining a generalized holomorphic bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GHConnection {
    entries: Vec<Vec<GVector>>,
}

impl GHConnection {
    pub fn new(entries: Vec<Vec<GVector>>, s: &GCStructure) -> Result<Self> {
        for row in &entries {
            if row.len() != entries.len() {
                return Err(Error::Precondition("connection matrix must be square".into()));
            }
            for v in row {
                s.ebar_coords(v)?;
            }
        }
        Ok(GHConnection { entries })
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &GVector {
        &self.entries[i][j]
    }

    pub fn zero(s: &GCStructure, r: usize) -> Self {
        GHConnection { entries: vec![vec![GVector::zero(s.chart()); r]; r] }
    }
}

impl std::fmt::Display for GHConnection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|row| format!("[{}]", row.iter().map(|v| format!("{{{v}}}")).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Embeds each holomorphic vector field entry as a `conj(E)` section
/// (holomorphic vector fields lie in `conj(E)` for Poisson structures).
pub fn to_generalized(a: &ConnectionMatrix, s: &GCStructure) -> Result<GHConnection> {
    if a.chart() != s.chart() {
        return Err(Error::ChartMismatch("connection and structure live on different charts".into()));
    }
    let entries =
        a.entries.iter().map(|row| row.iter().map(|v| GVector::from_vector(a.chart(), v.clone())).collect()).collect();
    GHConnection::new(entries, s)
}

/// Checks `dbar A + A ^ A = 0` in `Λ² conj(E)`, with
/// `(A ^ A)_ki = sum_j A_kj ^ A_ji`.
pub fn gh_check(g: &GHConnection, s: &GCStructure) -> Result<Verdict> {
    let r = g.rank();
    let secs: Vec<Vec<EbarSection>> = g
        .entries
        .iter()
        .map(|row| row.iter().map(|v| s.ebar_section(v)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    for k in 0..r {
        for i in 0..r {
            let mut acc = s.algebroid_dbar(&secs[k][i])?;
            for j in 0..r {
                acc = acc.plus(&secs[k][j].wedge(&secs[j][i]));
            }
            if !acc.is_zero() {
                return Ok(Verdict::fail(format!("entry ({}, {}): dbar A + A^A = {acc}", k + 1, i + 1)));
            }
        }
    }
    Ok(Verdict::pass())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_form_bracket_and_spinor() {
        let s = PoissonBivector::normal_form();
        let c = s.chart();
        let z1 = RationalFn::var(c, 0);
        let z2 = RationalFn::var(c, 2);
        assert_eq!(s.bracket(&z1, &z2), z1);
        assert_eq!(s.spinor().to_string(), "z1+dz1^dz2");
        let x = s.hamiltonian(&z2);
        assert_eq!(x[0], -&z1);
    }

    #[test]
    fn rejects_antiholomorphic_entries() {
        let c = Chart::new(2);
        assert!(matches!(PoissonBivector::surface(Polynomial::var(c, 1)), Err(Error::NotHolomorphic(_))));
    }

    #[test]
    fn jacobi_on_three_dimensional_example() {
        // d1^d2 + z2 d2^d3 fails: the Jacobiator of (z1, z2, z3) is 1.
        let c = Chart::new(3);
        let one = Polynomial::one(c);
        let bad = PoissonBivector::from_upper(c, &[(0, 1, one), (1, 2, Polynomial::var(c, 2))]).unwrap();
        assert!(matches!(jacobi_check(&bad, 1), Err(Error::JacobiFail(_))));
        assert!(jacobi_check(&PoissonBivector::normal_form(), 3).is_ok());
    }

    fn p(c: Chart, i: usize) -> Polynomial {
        Polynomial::var(c, i)
    }

    #[test]
    fn sections_example() {
        let c = Chart::new(2);
        let m = from_sections(&[vec![p(c, 0), Polynomial::zero(c)], vec![Polynomial::zero(c), Polynomial::one(c)]])
            .unwrap();
        assert_eq!(m.sigma, PoissonBivector::normal_form());
        assert_eq!(m.sigma.to_string(), "z1*e1^e2");
        assert_eq!(m.connection.to_string(), "[[e2,0],[0,0]]");
        assert!(module_check(&m.sigma, &m.connection, 2).pass);
        let id = from_sections(&[
            vec![Polynomial::one(c), Polynomial::zero(c)],
            vec![Polynomial::zero(c), Polynomial::one(c)],
        ])
        .unwrap();
        assert_eq!(id.connection, ConnectionMatrix::zero(c, 2));
        assert!(matches!(from_sections(&[vec![p(c, 0), p(c, 0)], vec![p(c, 0), p(c, 0)]]), Err(Error::SingularP)));
    }

    #[test]
    fn perturbed_connection_fails() {
        let c = Chart::new(2);
        let mut f = vec![RationalFn::zero(c); 4];
        f[0] = RationalFn::var(c, 2);
        let a = ConnectionMatrix::new(
            c,
            vec![vec![f, vec![RationalFn::zero(c); 4]], vec![vec![RationalFn::zero(c); 4]; 2]],
        )
        .unwrap();
        let v = module_check(&PoissonBivector::normal_form(), &a, 2);
        assert!(!v.pass);
        assert!(v.failure.is_some());
    }

    #[test]
    fn canonical_module_of_normal_form() {
        let s = PoissonBivector::normal_form();
        let a = canonical_module(&s);
        assert_eq!(a.to_string(), "[[-e2]]");
        assert!(canonical_module_check(&s, 3).pass);
        assert!(module_check(&s, &a, 2).pass);
    }

    #[test]
    fn bridge_on_sections_example() {
        let c = Chart::new(2);
        let m = from_sections(&[vec![p(c, 0), Polynomial::zero(c)], vec![Polynomial::zero(c), Polynomial::one(c)]])
            .unwrap();
        let s = GCStructure::from_poisson(&m.sigma).unwrap();
        let g = to_generalized(&m.connection, &s).unwrap();
        assert!(gh_check(&g, &s).unwrap().pass);
    }
}
