use serde::{Deserialize, Serialize};

use super::MetricError;

/// Lower clamp applied to similarities before correspondence and
/// intermediateness, keeping both defined for negative cosines.
pub const SIM_FLOOR: f64 = 1e-6;

/// A clip- or prompt-level embedding vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub clip_id: String,
    values: Vec<f64>,
}

impl Embedding {
    pub fn new(clip_id: impl Into<String>, values: Vec<f64>) -> Result<Self, MetricError> {
        if values.is_empty() {
            return Err(MetricError::EmptyInput);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(MetricError::NonFinite);
        }
        Ok(Self { clip_id: clip_id.into(), values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub fn cosine_sim(a: &Embedding, b: &Embedding) -> Result<f64, MetricError> {
    if a.dim() != b.dim() {
        return Err(MetricError::DimMismatch(a.dim(), b.dim()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(MetricError::ZeroVector);
    }
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

fn clamp_sim(s: f64) -> f64 {
    if s.is_nan() {
        SIM_FLOOR
    } else {
        s.clamp(SIM_FLOOR, 1.0)
    }
}

/// Harmonic mean of the two concept similarities, after clamping both to
/// `[SIM_FLOOR, 1]`.
pub fn correspondence(sim_x: f64, sim_y: f64) -> f64 {
    let (a, b) = (clamp_sim(sim_x), clamp_sim(sim_y));
    2.0 * a * b / (a + b)
}

/// `1 - |x - y| / max(x, y)` on clamped similarities.
pub fn intermediateness(sim_x: f64, sim_y: f64) -> Result<f64, MetricError> {
    let (a, b) = (clamp_sim(sim_x), clamp_sim(sim_y));
    let max = a.max(b);
    if max <= SIM_FLOOR {
        return Err(MetricError::BothNonpositive);
    }
    Ok(1.0 - (a - b).abs() / max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionalityParams {
    pub temperature: f64,
}

impl Default for DirectionalityParams {
    fn default() -> Self {
        Self { temperature: 0.05 }
    }
}

impl DirectionalityParams {
    pub fn validate(&self) -> Result<(), MetricError> {
        if self.temperature > 0.0 && self.temperature.is_finite() {
            Ok(())
        } else {
            Err(MetricError::InvalidTemperature(self.temperature))
        }
    }
}

/// Signed preference for the intended prompt over its reverse.
///
/// Two-way softmax at temperature `T` gives `p = sigmoid((s_int - s_rev)/T)`;
/// the score is `2p - 1 = tanh((s_int - s_rev) / 2T)`, in `[-1, 1]`.
pub fn directionality(s_int: f64, s_rev: f64, params: &DirectionalityParams) -> Result<f64, MetricError> {
    params.validate()?;
    if !s_int.is_finite() || !s_rev.is_finite() {
        return Err(MetricError::NonFinite);
    }
    let z = (s_int - s_rev) / params.temperature;
    // 2*sigmoid(z) - 1 == tanh(z/2), exactly odd and stable for large |z|
    Ok((0.5 * z).tanh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn emb(v: &[f64]) -> Embedding {
        Embedding::new("c", v.to_vec()).unwrap()
    }

    #[test]
    fn cosine_basics() {
        let a = emb(&[1.0, 2.0, 3.0]);
        assert!((cosine_sim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine_sim(&emb(&[1.0, 0.0]), &emb(&[0.0, 1.0])).unwrap(), 0.0);
        assert!(matches!(cosine_sim(&a, &emb(&[0.0, 0.0, 0.0])), Err(MetricError::ZeroVector)));
        assert!(matches!(cosine_sim(&a, &emb(&[1.0])), Err(MetricError::DimMismatch(3, 1))));
        assert!(Embedding::new("x", vec![f64::NAN]).is_err());
    }

    #[test]
    fn closed_forms() {
        assert!((correspondence(0.8, 0.4) - 0.64 / 1.2).abs() < 1e-12);
        assert!((intermediateness(0.8, 0.4).unwrap() - 0.5).abs() < 1e-12);
        assert!((correspondence(0.37, 0.37) - 0.37).abs() < 1e-15);
        assert_eq!(intermediateness(0.6, 0.6).unwrap(), 1.0);
        // negative similarity clamps to the floor
        let c = correspondence(-0.2, 0.5);
        assert!((c - 2.0 * SIM_FLOOR * 0.5 / (0.5 + SIM_FLOOR)).abs() < 1e-15);
        assert!((c - 2e-6).abs() < 1e-10);
        assert!(intermediateness(0.9, 1e-9).unwrap() < 1e-5);
        assert!(matches!(intermediateness(-0.3, -0.1), Err(MetricError::BothNonpositive)));
    }

    #[test]
    fn directionality_values() {
        let p = DirectionalityParams::default();
        assert_eq!(directionality(0.3, 0.3, &p).unwrap(), 0.0);
        let expect = 2.0 / (1.0 + (-1.0f64).exp()) - 1.0;
        assert!((directionality(0.35, 0.30, &p).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 0.46212).abs() < 1e-5);
        assert_eq!(directionality(1.0, -1.0, &p).unwrap(), 1.0);
        assert!(directionality(0.1, 0.1, &DirectionalityParams { temperature: 0.0 }).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_metrics(a in -1.0f64..1.0, b in -1.0f64..1.0) {
            prop_assert_eq!(correspondence(a, b), correspondence(b, a));
            if a.max(b) > SIM_FLOOR {
                prop_assert_eq!(intermediateness(a, b).unwrap(), intermediateness(b, a).unwrap());
            }
            let p = DirectionalityParams::default();
            prop_assert_eq!(directionality(a, b, &p).unwrap(), -directionality(b, a, &p).unwrap());
        }

        #[test]
        fn harmonic_mean_bounds(a in 1e-3f64..1.0, b in 1e-3f64..1.0) {
            let c = correspondence(a, b);
            prop_assert!(a.min(b) - 1e-12 <= c && c <= a.max(b) + 1e-12);
        }

        #[test]
        fn directionality_monotone(a in -1.0f64..1.0, d in 1e-4f64..0.5, b in -1.0f64..1.0) {
            let p = DirectionalityParams::default();
            prop_assert!(directionality(a + d, b, &p).unwrap() >= directionality(a, b, &p).unwrap());
        }
    }
}
