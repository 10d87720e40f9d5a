//! Rules turning a (mini-batch) gradient into a parameter step.

use ndarray::{Array2, Zip};

use crate::element::Element;

/// Maps an averaged gradient to the step added to the iterate.
pub trait UpdatePolicy<T: Element> {
    fn step(&mut self, gradient: &Array2<T>, step_size: T) -> Array2<T>;
}

/// Configuration-level choice of update policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdatePolicyKind {
    Vanilla,
    Momentum {
        momentum: f64,
    },
    Adam {
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    },
}

impl UpdatePolicyKind {
    pub const MOMENTUM: Self = Self::Momentum { momentum: 0.9 };
    pub const ADAM: Self = Self::Adam {
        beta1: 0.9,
        beta2: 0.999,
        epsilon: 1e-8,
    };

    pub(crate) fn validate(&self) -> Result<(), (&'static str, &'static str)> {
        let unit = |v: f64| (0.0..1.0).contains(&v);
        match *self {
            Self::Vanilla => Ok(()),
            Self::Momentum { momentum } if !unit(momentum) => {
                Err(("momentum", "must lie in [0, 1)"))
            }
            Self::Momentum { .. } => Ok(()),
            Self::Adam { beta1, .. } if !unit(beta1) => Err(("beta1", "must lie in [0, 1)")),
            Self::Adam { beta2, .. } if !unit(beta2) => Err(("beta2", "must lie in [0, 1)")),
            Self::Adam { epsilon, .. } if !(epsilon > 0.0) => Err(("epsilon", "must be positive")),
            Self::Adam { .. } => Ok(()),
        }
    }

    pub fn build<T: Element>(&self) -> Box<dyn UpdatePolicy<T>> {
        match *self {
            Self::Vanilla => Box::new(VanillaUpdate),
            Self::Momentum { momentum } => Box::new(MomentumUpdate::new(momentum)),
            Self::Adam {
                beta1,
                beta2,
                epsilon,
            } => Box::new(AdamUpdate::new(beta1, beta2, epsilon)),
        }
    }
}

/// `step = -step_size * g`.
#[derive(Debug, Clone, Copy, Default)]
pub struct VanillaUpdate;

impl<T: Element> UpdatePolicy<T> for VanillaUpdate {
    fn step(&mut self, gradient: &Array2<T>, step_size: T) -> Array2<T> {
        let neg = -step_size;
        gradient.mapv(|g| neg * g)
    }
}

/// Heavy-ball momentum: `v <- mu v + g`, `step = -step_size * v`.
#[derive(Debug, Clone)]
pub struct MomentumUpdate<T: Element> {
    momentum: T,
    velocity: Option<Array2<T>>,
}

impl<T: Element> MomentumUpdate<T> {
    pub fn new(momentum: f64) -> Self {
        Self {
            momentum: T::of(momentum),
            velocity: None,
        }
    }

    pub fn velocity(&self) -> Option<&Array2<T>> {
        self.velocity.as_ref()
    }
}

impl<T: Element> UpdatePolicy<T> for MomentumUpdate<T> {
    fn step(&mut self, gradient: &Array2<T>, step_size: T) -> Array2<T> {
        let mu = self.momentum;
        let v = self
            .velocity
            .get_or_insert_with(|| Array2::zeros(gradient.dim()));
        Zip::from(&mut *v)
            .and(gradient)
            .for_each(|v, &g| *v = mu * *v + g);
        let neg = -step_size;
        v.mapv(|v| neg * v)
    }
}

/// Adam with bias-corrected first and second moments.
#[derive(Debug, Clone)]
pub struct AdamUpdate<T: Element> {
    beta1: T,
    beta2: T,
    epsilon: T,
    m: Option<Array2<T>>,
    v: Option<Array2<T>>,
    t: i32,
}

impl<T: Element> AdamUpdate<T> {
    pub fn new(beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            beta1: T::of(beta1),
            beta2: T::of(beta2),
            epsilon: T::of(epsilon),
            m: None,
            v: None,
            t: 0,
        }
    }

    /// Steps taken so far.
    pub fn time(&self) -> i32 {
        self.t
    }
}

impl<T: Element> UpdatePolicy<T> for AdamUpdate<T> {
    fn step(&mut self, gradient: &Array2<T>, step_size: T) -> Array2<T> {
        let (b1, b2, eps) = (self.beta1, self.beta2, self.epsilon);
        let one = T::one();
        self.t = self.t.saturating_add(1);
        let m = self.m.get_or_insert_with(|| Array2::zeros(gradient.dim()));
        let v = self.v.get_or_insert_with(|| Array2::zeros(gradient.dim()));
        Zip::from(&mut *m)
            .and(&mut *v)
            .and(gradient)
            .for_each(|m, v, &g| {
                *m = b1 * *m + (one - b1) * g;
                *v = b2 * *v + (one - b2) * g * g;
            });
        let m_correction = one - b1.powi(self.t);
        let v_correction = one - b2.powi(self.t);
        let mut step = Array2::zeros(gradient.dim());
        Zip::from(&mut step)
            .and(&*m)
            .and(&*v)
            .for_each(|s, &m, &v| {
                let m_hat = m / m_correction;
                let v_hat = v / v_correction;
                *s = -step_size * m_hat / (v_hat.sqrt() + eps);
            });
        step
    }
}
