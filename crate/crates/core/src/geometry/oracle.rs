use std::fmt;
use std::sync::Arc;

use super::HPolytope;

type Membership = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;
type Gauge = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A convex body known only through a membership test, a bounding radius
/// (`body ⊆ radius · B_2^n`) and optionally its Minkowski gauge.
#[derive(Clone)]
pub struct BodyOracle {
    dim: usize,
    radius: f64,
    membership: Membership,
    gauge: Option<Gauge>,
}

impl fmt::Debug for BodyOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BodyOracle")
            .field("dim", &self.dim)
            .field("radius", &self.radius)
            .field("has_gauge", &self.gauge.is_some())
            .finish()
    }
}

impl BodyOracle {
    pub fn from_membership(dim: usize, radius: f64, member: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        Self {
            dim,
            radius,
            membership: Arc::new(member),
            gauge: None,
        }
    }

    /// Body `{x : gauge(x) <= 1}`.
    pub fn from_gauge(dim: usize, radius: f64, gauge: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        let gauge: Gauge = Arc::new(gauge);
        let g = gauge.clone();
        Self {
            dim,
            radius,
            membership: Arc::new(move |x| g(x) <= 1.0),
            gauge: Some(gauge),
        }
    }

    pub fn euclidean_ball(dim: usize) -> Self {
        Self::from_gauge(dim, 1.0, |x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Unit ball of `l_p^n`, `p = f64::INFINITY` allowed.
    pub fn lp_ball(dim: usize, p: f64) -> Self {
        let radius = if p >= 2.0 {
            (dim as f64).powf(0.5 - 1.0 / p)
        } else {
            1.0
        };
        if p.is_infinite() {
            Self::from_gauge(dim, radius, |x| x.iter().fold(0.0, |m, v| m.max(v.abs())))
        } else {
            Self::from_gauge(dim, radius, move |x| {
                x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
            })
        }
    }

    pub fn from_hpolytope(p: &HPolytope, radius: f64) -> Self {
        let p = p.clone();
        Self::from_gauge(p.dim(), radius, move |x| p.gauge(x))
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (self.membership)(x)
    }

    pub fn gauge(&self, x: &[f64]) -> Option<f64> {
        self.gauge.as_ref().map(|g| g(x))
    }

    pub fn has_gauge(&self) -> bool {
        self.gauge.is_some()
    }
}
