use crate::tensor::{ParamSet, Parameter};

/// Adam with bias correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Adam {
    pub fn new(lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn step(&self, params: &mut ParamSet) {
        for p in params.iter_mut() {
            adam_step(p, self.lr, self.beta1, self.beta2, self.eps);
        }
    }
}

impl Default for Adam {
    fn default() -> Self {
        Adam::new(0.01)
    }
}

/// One Adam update of `param` from its current gradient.
pub fn adam_step(param: &mut Parameter, lr: f64, beta1: f64, beta2: f64, eps: f64) {
    param.step += 1;
    let t = param.step as i32;
    let c1 = 1.0 - beta1.powi(t);
    let c2 = 1.0 - beta2.powi(t);
    let values = param.value.as_mut_slice();
    let m = param.m.as_mut_slice();
    let v = param.v.as_mut_slice();
    for (((w, &g), mi), vi) in values.iter_mut().zip(param.grad.as_slice()).zip(m).zip(v) {
        *mi = beta1 * *mi + (1.0 - beta1) * g;
        *vi = beta2 * *vi + (1.0 - beta2) * g * g;
        let m_hat = *mi / c1;
        let v_hat = *vi / c2;
        *w -= lr * m_hat / (v_hat.sqrt() + eps);
    }
}
