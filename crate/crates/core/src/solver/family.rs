//! Builtin right-hand sides `f(X, nu)`.
//!
//! Every family depends on `X` only through `|X|` and on `nu` only through
//! its last component, so all of them share the symmetry axis of the
//! profile grids (the `z` axis for surfaces, the `y` axis for curves).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `f = c`.
    Constant { c: f64 },
    /// `f = c (1 + a <nu, e>)`.
    NormalLinear { c: f64, a: f64 },
    /// `f = c (1 + a <nu, e>^2)`.
    NormalEven { c: f64, a: f64 },
    /// `f = c (1 + b |X|^2)`.
    Radial { c: f64, b: f64 },
}

/// Right-hand side of the equation together with its declared bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrescribedData {
    pub family: Family,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Constant { .. } => "constant",
            Family::NormalLinear { .. } => "normal_linear",
            Family::NormalEven { .. } => "normal_even",
            Family::Radial { .. } => "radial",
        }
    }

    /// The sweep parameter: `c` for constants, `a` for the normal families,
    /// `b` for the radial family.
    pub fn param(&self) -> f64 {
        match *self {
            Family::Constant { c } => c,
            Family::NormalLinear { a, .. } | Family::NormalEven { a, .. } => a,
            Family::Radial { b, .. } => b,
        }
    }

    pub fn param_name(&self) -> &'static str {
        match self {
            Family::Constant { .. } => "c",
            Family::NormalLinear { .. } | Family::NormalEven { .. } => "a",
            Family::Radial { .. } => "b",
        }
    }

    pub fn with_param(&self, p: f64) -> Family {
        match *self {
            Family::Constant { .. } => Family::Constant { c: p },
            Family::NormalLinear { c, .. } => Family::NormalLinear { c, a: p },
            Family::NormalEven { c, .. } => Family::NormalEven { c, a: p },
            Family::Radial { c, .. } => Family::Radial { c, b: p },
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            Family::Constant { c } | Family::NormalLinear { c, .. } | Family::NormalEven { c, .. } | Family::Radial { c, .. } => c,
        }
    }
}

impl PrescribedData {
    pub fn new(family: Family) -> Result<Self> {
        let d = Self { family };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.family.scale();
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::validation("family.c", format!("scale must be positive and finite, got {c}")));
        }
        let p = self.family.param();
        if !p.is_finite() {
            return Err(Error::validation(
                format!("family.{}", self.family.param_name()),
                "parameter must be finite",
            ));
        }
        if let Family::Radial { b, .. } = self.family {
            if b < 0.0 {
                return Err(Error::validation("family.b", format!("must be non-negative, got {b}")));
            }
        }
        let inf = self.inf_f();
        if !(inf > 0.0) {
            return Err(Error::validation(
                format!("family.{}", self.family.param_name()),
                format!("f must be a positive function, but inf f = {inf} <= 0"),
            ));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64], nu: &[f64]) -> f64 {
        let e = nu[nu.len() - 1];
        match self.family {
            Family::Constant { c } => c,
            Family::NormalLinear { c, a } => c * (1.0 + a * e),
            Family::NormalEven { c, a } => c * (1.0 + a * e * e),
            Family::Radial { c, b } => c * (1.0 + b * x.iter().map(|v| v * v).sum::<f64>()),
        }
    }

    /// `d_X f`.
    pub fn grad_x(&self, x: &[f64], _nu: &[f64]) -> Vec<f64> {
        match self.family {
            Family::Radial { c, b } => x.iter().map(|v| 2.0 * c * b * v).collect(),
            _ => vec![0.0; x.len()],
        }
    }

    /// `d_nu f`.
    pub fn grad_nu(&self, _x: &[f64], nu: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; nu.len()];
        let last = nu.len() - 1;
        match self.family {
            Family::NormalLinear { c, a } => g[last] = c * a,
            Family::NormalEven { c, a } => g[last] = 2.0 * c * a * nu[last],
            _ => {}
        }
        g
    }

    /// Infimum over unit normals (and all positions for the radial family).
    pub fn inf_f(&self) -> f64 {
        match self.family {
            Family::Constant { c } => c,
            Family::NormalLinear { c, a } => c * (1.0 - a.abs()),
            Family::NormalEven { c, a } => c * (1.0 + a.min(0.0)),
            Family::Radial { c, .. } => c,
        }
    }

    /// Proxy for the `C^2` norm: the supremum of `|f| + |Df| + |D^2 f|` over
    /// unit normals with `|X| = 1`.
    pub fn c2_bound(&self) -> f64 {
        match self.family {
            Family::Constant { c } => c,
            Family::NormalLinear { c, a } => c * (1.0 + 2.0 * a.abs()),
            Family::NormalEven { c, a } => c * (1.0 + 5.0 * a.abs()),
            Family::Radial { c, b } => c * (1.0 + 5.0 * b),
        }
    }

    /// `f` does not depend on `X`, so translates of a solution are solutions.
    pub fn translation_invariant(&self) -> bool {
        !matches!(self.family, Family::Radial { .. })
    }

    /// Worst relative mismatch between the supplied gradients and centred
    /// differences of `f` at the given `(X, nu)` points.
    pub fn gradient_check(&self, points: &[(Vec<f64>, Vec<f64>)]) -> f64 {
        let mut worst: f64 = 0.0;
        let step = 1e-5;
        for (x, nu) in points {
            let (gx, gn) = (self.grad_x(x, nu), self.grad_nu(x, nu));
            for (which, g) in [(0, &gx), (1, &gn)] {
                for i in 0..g.len() {
                    let shifted = |t: f64| {
                        let (mut xs, mut ns) = (x.clone(), nu.clone());
                        if which == 0 {
                            xs[i] += t;
                        } else {
                            ns[i] += t;
                        }
                        self.value(&xs, &ns)
                    };
                    let fd = (shifted(step) - shifted(-step)) / (2.0 * step);
                    worst = worst.max(crate::tolerance::relative_error(fd, g[i]));
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradients_match_differences() {
        let pts = vec![
            (vec![0.3, -0.2, 1.1], vec![0.6, 0.0, 0.8]),
            (vec![1.0, 0.5, -0.4], vec![0.0, 0.6, -0.8]),
        ];
        for fam in [
            Family::Constant { c: 2.0 },
            Family::NormalLinear { c: 1.0, a: 0.3 },
            Family::NormalEven { c: 2.0, a: -0.4 },
            Family::Radial { c: 1.5, b: 0.2 },
        ] {
            let d = PrescribedData::new(fam).unwrap();
            assert!(d.gradient_check(&pts) < 1e-4, "{fam:?}");
        }
    }

    #[test]
    fn positivity_is_enforced() {
        assert!(PrescribedData::new(Family::NormalLinear { c: 1.0, a: 1.5 }).is_err());
        assert!(PrescribedData::new(Family::Constant { c: 0.0 }).is_err());
        assert!(PrescribedData::new(Family::NormalEven { c: 1.0, a: -1.0 }).is_err());
        let e = PrescribedData::new(Family::NormalLinear { c: 1.0, a: -2.0 }).unwrap_err();
        assert!(e.to_string().contains("positive"), "{e}");
    }
}
