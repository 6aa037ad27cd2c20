use cylwave_core::model::{solve_mode, Family, Geometry, Medium, ModeSpec, PropagatingMode, Quadratures};

pub fn medium() -> Medium {
    Medium::new(2.0, 3.0).unwrap()
}

pub fn quad() -> Quadratures {
    Quadratures::new(0.8, -0.45).unwrap()
}

/// TEM plus TM/TE with n in 0..3, m in 1..3 on a coax of the given ratio and
/// a hollow guide, all with a = 1.
pub fn modes(ratio: f64) -> Vec<PropagatingMode> {
    let coax = Geometry::coaxial(1.0, ratio).unwrap();
    let hollow = Geometry::hollow(1.0).unwrap();
    let mut out = vec![solve_mode(ModeSpec::tem(), coax, medium(), 3.0, 1).unwrap()];
    for fam in [Family::Tm, Family::Te] {
        for n in 0..3 {
            for m in 1..3 {
                for g in [coax, hollow] {
                    let spec = ModeSpec::new(fam, n, m).with_phases(0.3, 0.2);
                    out.push(solve_mode(spec, g, medium(), 3.0, 1).unwrap());
                }
            }
        }
    }
    out
}

/// Coax modes for three ratios, hollow modes once.
pub fn all_modes() -> Vec<PropagatingMode> {
    let mut out = modes(2.0);
    for ratio in [1.2, 5.0] {
        out.extend(modes(ratio).into_iter().filter(|m| m.geometry().is_coaxial()));
    }
    out
}
