//! Gauss–Legendre rules on the simplices used by the nested integrals.

use splitlab::matcore::{expm, opnorm2, CMat};
use splitlab::quadrature::{gauss_legendre, refine_until, Integrand, QuadratureRule};
use splitlab::Result;

fn main() -> Result<()> {
    let rule = gauss_legendre(8);
    let exact_deg = 2 * rule.nodes.len() - 1;
    let integral: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(exact_deg as i32)).sum();
    println!("8-point rule, ∫ x^{exact_deg} over [−1, 1] = {integral:.3e} (odd, exactly 0)");

    let one = CMat::identity(1);
    let q = QuadratureRule::default();
    let t = 0.7;
    let area = q.integrate2(|_, _| one.clone(), t)?;
    let volume = q.integrate3(|_, _, _| one.clone(), t)?;
    println!("simplex area {:.15} (t²/2 = {:.15})", area[(0, 0)].re, t * t / 2.0);
    println!("simplex volume {:.15} (t³/6 = {:.15})", volume[(0, 0)].re, t.powi(3) / 6.0);

    // ∫₀ᵗ e^{τM} dτ = M⁻¹(e^{tM} − I) for M = [[0,1],[1,0]]
    let m = CMat::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])?;
    let f = |tau: f64| expm(&m.scale_real(tau)).expect("finite");
    let refined = refine_until(&Integrand::Single(&f), 2.0, 1e-12)?;
    let exact = &m * &(&expm(&m.scale_real(2.0))? - &CMat::identity(2));
    println!(
        "∫₀² e^(τM) dτ: error {:.2e} after refinement to {} nodes",
        opnorm2(&(&refined.value - &exact)),
        refined.nodes_per_level
    );
    Ok(())
}
