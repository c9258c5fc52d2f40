//! CSV artifacts: solution profiles, oracle snapshots, and invariance
//! residuals. Numbers are written in scientific notation with 12 digits
//! after the point and `.` as decimal separator.

use crate::error::{Error, Result};
use crate::fd_oracle::Snapshot;
use crate::material::{kirchhoff_inverse, MaterialSpec};
use crate::scalar::Real;
use crate::self_similar::SelfSimilarSolution;
use crate::symmetry::InvarianceReport;
use crate::travelling_wave::TravellingWaveSolution;

/// `{:.12e}` of a scalar.
pub fn sci<S: Real>(x: S) -> String {
    format!("{:.12e}", x.as_f64())
}

struct Table {
    out: csv::Writer<Vec<u8>>,
    preamble: String,
}

impl Table {
    fn new(header: &str, columns: &[&str]) -> Result<Self> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        out.write_record(columns).map_err(io)?;
        let preamble = if header.is_empty() { String::new() } else { format!("# {header}\n") };
        Ok(Self { out, preamble })
    }

    fn row<I, T>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.out.write_record(fields).map_err(io)
    }

    fn finish(self) -> Result<String> {
        let body = self.out.into_inner().map_err(|e| Error::Contract(e.to_string()))?;
        let body = String::from_utf8(body).map_err(|e| Error::Contract(e.to_string()))?;
        Ok(self.preamble + &body)
    }
}

fn io(e: csv::Error) -> Error {
    Error::Contract(format!("csv: {e}"))
}

/// Travelling-wave profile at moving-frame coordinates `xis` (m):
/// `xi_m,eta,phase,T_K,u_or_v_Jm3`. `header` (without `#`) becomes the
/// first line when non-empty.
pub fn travelling_wave_csv<S: Real>(
    sol: &TravellingWaveSolution<S>,
    spec: &MaterialSpec<S>,
    xis: &[S],
    header: &str,
) -> Result<String> {
    let mut t = Table::new(header, &["xi_m", "eta", "phase", "T_K", "u_or_v_Jm3"])?;
    for &xi in xis {
        let eta = sol.eta_of_xi(xi)?;
        let (phase, w) = sol.enthalpy_at(xi)?;
        let temp = kirchhoff_inverse(spec, phase, w)?;
        t.row([sci(xi), sci(eta), phase.to_string(), sci(temp), sci(w)])?;
    }
    t.finish()
}

/// `mu,delta,delta_star,u_s,residual` and one value row.
pub fn travelling_wave_summary<S: Real>(sol: &TravellingWaveSolution<S>, header: &str) -> Result<String> {
    let mut t = Table::new(header, &["mu", "delta", "delta_star", "u_s", "residual"])?;
    t.row([sci(sol.mu), sci(sol.delta), sci(sol.delta_star), sci(sol.u_s), sci(sol.residual)])?;
    t.finish()
}

/// Similarity profile at `omegas` (m·s^-1/2): `omega,phase,w_Jm3,T_K`.
pub fn self_similar_csv<S: Real>(
    sol: &SelfSimilarSolution<S>,
    spec: &MaterialSpec<S>,
    omegas: &[S],
    header: &str,
) -> Result<String> {
    let mut t = Table::new(header, &["omega", "phase", "w_Jm3", "T_K"])?;
    for &om in omegas {
        let (phase, w) = sol.enthalpy_at(om)?;
        let temp = kirchhoff_inverse(spec, phase, w)?;
        t.row([sci(om), phase.to_string(), sci(w), sci(temp)])?;
    }
    t.finish()
}

/// `omega1,omega2,bc_residual` and one value row.
pub fn self_similar_summary<S: Real>(sol: &SelfSimilarSolution<S>, header: &str) -> Result<String> {
    let mut t = Table::new(header, &["omega1", "omega2", "bc_residual"])?;
    t.row([sci(sol.omega1), sci(sol.omega2), sci(sol.bc_residual)])?;
    t.finish()
}

/// Oracle snapshots with temperatures: `t,s1,s2,phase,x,T`.
pub fn snapshots_csv<S: Real>(snaps: &[Snapshot<S>], spec: &MaterialSpec<S>, header: &str) -> Result<String> {
    let mut t = Table::new(header, &["t", "s1", "s2", "phase", "x", "T"])?;
    for s in snaps {
        for &(phase, x, w) in &s.nodes {
            let temp = kirchhoff_inverse(spec, phase, w)?;
            t.row([sci(s.t), sci(s.s1), sci(s.s2), phase.to_string(), sci(x), sci(temp)])?;
        }
    }
    t.finish()
}

/// Residual of every sampled `(family, item, condition, ε)`:
/// `family,item,condition,eps,residual`.
pub fn residual_csv(reports: &[InvarianceReport], header: &str) -> Result<String> {
    let mut t = Table::new(header, &["family", "item", "condition", "eps", "residual"])?;
    for r in reports {
        for rec in &r.records {
            t.row([
                rec.family.clone(),
                format!("{:?}", rec.item),
                rec.condition.clone(),
                sci(rec.eps),
                sci(rec.residual),
            ])?;
        }
    }
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_has_twelve_digits() {
        assert_eq!(sci(0.1f64), "1.000000000000e-1");
        assert_eq!(sci(-2.5e10f64), "-2.500000000000e10");
    }

    #[test]
    fn fields_with_commas_are_quoted() {
        let mut t = Table::new("h", &["a", "b"]).unwrap();
        t.row(["x, y", "z"]).unwrap();
        assert_eq!(t.finish().unwrap(), "# h\na,b\n\"x, y\",z\n");
    }
}
