use log::warn;
use super::fock::{a_left, a_right, adag_left, adag_right};
use super::state::CavityState;
use crate::atoms::{AtomPairState, EE, EG, GE, GG};
use crate::error::Result;
use crate::reservoir::{detuning_envelope, sinc, InteractionParams};
use crate::C64;

/// Collision map expanded to second order in `gτ`.
///
/// Writing `s = sinc(δτ/2)`, `f = s e^{iδτ/2}` and `R` for the detuning
/// envelope (`Re R = s²`), each atomic matrix element `ρᵢⱼ` multiplies a
/// field superoperator:
///
/// * populations: `ρ_ee,ee` drives absorption by the field (`a†ρa`),
///   `ρ_gg,gg` emission (`aρa†`), and the singly excited populations half of
///   each, with the dispersive `Im R` parts attached to `a a†` and `a†a`;
/// * one-excitation coherences: `(gτ)² s² (a†ρa + aρa† − ρaa† − a†aρ)`;
/// * `Δn = ±1` coherences: `±i gτ f (…)`, first order commutators with `a`, `a†`;
/// * `ρ_ee,gg`, `ρ_gg,ee`: two-photon terms `f² (2aρa − a²ρ − ρa²)` and conjugate.
///
/// The result is trace preserving exactly but only positive to the order of
/// the expansion. A warning is logged when `gτ` is outside the Markov regime.
pub fn superoperator_second_order(
    cavity: &CavityState,
    atoms: &AtomPairState,
    params: &InteractionParams,
) -> Result<CavityState> {
    params.validate()?;
    if !params.is_markovian() {
        warn!("gτ = {:.3} is outside the Markov regime; second-order map is unreliable", params.g_tau());
    }
    let rho = cavity.matrix();
    let x = params.delta * params.tau;
    let gt = params.g_tau();
    let k2 = gt * gt;
    let s = sinc(0.5 * x);
    let s2 = C64::new(s * s, 0.0);
    let f = C64::from_polar(s, 0.5 * x);
    let r = detuning_envelope(params.delta, params.tau).r;
    let i = C64::new(0.0, 1.0);
    let at = |p, q| atoms.get(p, q);

    let ra = a_right(rho);
    let rad = adag_right(rho);
    let ar = a_left(rho);
    let adr = adag_left(rho);
    let aadr = a_left(&adr); // a a† ρ
    let raad = adag_right(&ra); // ρ a a†
    let adar = adag_left(&ar); // a† a ρ
    let rada = a_right(&rad); // ρ a† a
    let adra = adag_left(&ra); // a† ρ a
    let arad = a_left(&rad); // a ρ a†
    let aar = a_left(&ar);
    let raa = a_right(&ra);
    let adadr = adag_left(&adr);
    let radad = adag_right(&rad);
    let ara = a_left(&ra);
    let adrad = adag_left(&rad);

    let mut out = rho.clone();

    // Populations.
    let p_ee = at(EE, EE);
    out -= (&raad * r.conj() + &aadr * r - &adra * (s2 * 2.0)) * (p_ee * k2);
    let p_gg = at(GG, GG);
    out -= (&adar * r.conj() + &rada * r - &arad * (s2 * 2.0)) * (p_gg * k2);
    let p_single = at(EG, EG) + at(GE, GE);
    out -= ((&aadr * r + &raad * r.conj() + &adar * r.conj() + &rada * r) * C64::from(0.5)
        - (&adra + &arad) * s2)
        * (p_single * k2);

    // One-excitation coherences.
    let c_single = at(EG, GE) + at(GE, EG);
    // Symmetrised so that the truncated map stays Hermitian; equal to
    // `a†ρa + aρa† − ρaa† − a†aρ` on the untruncated space.
    let sym = (&raad + &adar + &aadr + &rada) * C64::from(0.5);
    out += (&adra + &arad - sym) * (c_single * k2 * s2);

    // Δn = ±1 coherences.
    let up = at(EE, EG) + at(EE, GE) + at(EG, GG) + at(GE, GG);
    let down = at(EG, EE) + at(GE, EE) + at(GG, EG) + at(GG, GE);
    out += (&rad - &adr) * (up * i * gt * f.conj());
    out += (&ra - &ar) * (down * i * gt * f);

    // Two-photon coherences.
    out += (&adrad * C64::from(2.0) - &adadr - &radad) * (at(EE, GG) * k2 * f.conj() * f.conj());
    out += (&ara * C64::from(2.0) - &aar - &raa) * (at(GG, EE) * k2 * f * f);

    CavityState::from_matrix(out)
}
