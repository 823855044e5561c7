use crate::error::{Error, Result};

/// A point `(t, r₁, r₂, r₃)` in units where signals travel at speed 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub r: [f64; 3],
}

impl SpacetimeEvent {
    pub fn new(t: f64, r: [f64; 3]) -> Result<Self> {
        if !t.is_finite() || r.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("spacetime coordinates must be finite"));
        }
        Ok(Self { t, r })
    }
}

/// `e1 ⇝ e2`: `e1` lies in the backward lightcone of `e2`,
/// i.e. `(t−t′)² ≥ ‖r−r′‖²` and `t ≤ t′`.
pub fn lightcone_ordered(e1: &SpacetimeEvent, e2: &SpacetimeEvent) -> bool {
    let dt = e2.t - e1.t;
    let dr2: f64 = e1.r.iter().zip(&e2.r).map(|(a, b)| (a - b) * (a - b)).sum();
    dt >= 0.0 && dt * dt >= dr2
}

/// Two time-ordered pairs `A ⇝ X` and `B ⇝ Y` are spacelike separated when
/// neither `A ⇝ Y` nor `B ⇝ X`.
pub fn spacelike_separated(
    pair_a: (&SpacetimeEvent, &SpacetimeEvent),
    pair_b: (&SpacetimeEvent, &SpacetimeEvent),
) -> Result<bool> {
    if !lightcone_ordered(pair_a.0, pair_a.1) || !lightcone_ordered(pair_b.0, pair_b.1) {
        return Err(Error::invalid("each pair must be time-ordered (input ⇝ output)"));
    }
    Ok(!lightcone_ordered(pair_a.0, pair_b.1) && !lightcone_ordered(pair_b.0, pair_a.1))
}
