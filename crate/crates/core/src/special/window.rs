//! C^∞ windows built from the smooth step `B(u) = g(u)/(g(u)+g(1−u))`,
//! `g(u) = exp(−1/u)`.

/// Smooth step: 0 for `u <= 0`, 1 for `u >= 1`, and `B(u) + B(1−u) = 1`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    // g(u)/(g(u)+g(1-u)) = 1/(1 + exp(1/u - 1/(1-u)))
    1.0 / (1.0 + (1.0 / u - 1.0 / (1.0 - u)).exp())
}

/// Plateau window: 0 outside `(lo, hi)`, 1 on `[a, b]`, smooth steps between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpWindow {
    pub lo: f64,
    pub a: f64,
    pub b: f64,
    pub hi: f64,
}

impl BumpWindow {
    pub const fn new(lo: f64, a: f64, b: f64, hi: f64) -> Self {
        Self { lo, a, b, hi }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            0.0
        } else if x < self.a {
            smooth_step((x - self.lo) / (self.a - self.lo))
        } else if x <= self.b {
            1.0
        } else {
            smooth_step((self.hi - x) / (self.hi - self.b))
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// The dyadic window: support `[3/4, 2]`, equal to 1 on `[1, 3/2]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DyadicWindow;

impl DyadicWindow {
    pub const SHAPE: BumpWindow = BumpWindow::new(0.75, 1.0, 1.5, 2.0);

    pub fn eval(&self, x: f64) -> f64 {
        Self::SHAPE.eval(x)
    }
}

pub fn dyadic_window(x: f64) -> f64 {
    DyadicWindow.eval(x)
}

/// `|Σ_{j>=0} W(x/2^j) − 1|` for `x >= 1`.
pub fn dyadic_partition_residual(x: f64) -> f64 {
    assert!(x >= 1.0, "partition residual needs x >= 1");
    let mut sum = 0.0;
    let mut y = x;
    while y > 0.75 {
        sum += dyadic_window(y);
        y *= 0.5;
    }
    (sum - 1.0).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_examples() {
        assert_eq!(dyadic_window(1.0), 1.0);
        assert_eq!(dyadic_window(1.5), 1.0);
        assert_eq!(dyadic_window(3.0), 0.0);
        assert_eq!(dyadic_window(0.75), 0.0);
        assert_eq!(dyadic_window(2.0), 0.0);
    }

    #[test]
    fn complementary_on_one_to_three() {
        for i in 0..=400 {
            let x = 1.0 + 2.0 * i as f64 / 400.0;
            let s = dyadic_window(x) + dyadic_window(x / 2.0);
            assert!((s - 1.0).abs() < 1e-14, "x={x} s={s}");
        }
    }

    #[test]
    fn residual_far_out() {
        assert!(dyadic_partition_residual(1e6 + 0.5) <= 1e-10);
    }

    #[test]
    fn step_is_symmetric() {
        for i in 0..=100 {
            let u = i as f64 / 100.0;
            assert!((smooth_step(u) + smooth_step(1.0 - u) - 1.0).abs() < 1e-15);
        }
    }
}
