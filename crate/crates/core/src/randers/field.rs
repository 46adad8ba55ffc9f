//! Riemannian metric fields and one-forms on the plane.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Tensor = [[f64; 2]; 2];

type TensorFn = dyn Fn([f64; 2]) -> Tensor + Send + Sync;
type ScalarFn = dyn Fn([f64; 2]) -> f64 + Send + Sync;
type CovectorFn = dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync;

/// Step for central-difference gradients of user-supplied potentials.
const GRADIENT_STEP: f64 = 1e-6;

/// `x -> a_ij(x)`, symmetric positive definite.
#[derive(Clone)]
pub enum MetricField {
    Euclidean,
    Diagonal(f64, f64),
    Custom(Arc<TensorFn>),
}

impl MetricField {
    pub fn custom(f: impl Fn([f64; 2]) -> Tensor + Send + Sync + 'static) -> Self {
        MetricField::Custom(Arc::new(f))
    }

    pub fn tensor(&self, p: [f64; 2]) -> Tensor {
        match self {
            MetricField::Euclidean => [[1.0, 0.0], [0.0, 1.0]],
            MetricField::Diagonal(a1, a2) => [[*a1, 0.0], [0.0, *a2]],
            MetricField::Custom(f) => f(p),
        }
    }

    /// `sqrt(a_ij v^i v^j)`.
    pub fn norm(&self, p: [f64; 2], v: [f64; 2]) -> f64 {
        match self {
            MetricField::Euclidean => v[0].hypot(v[1]),
            _ => {
                let a = self.tensor(p);
                (a[0][0] * v[0] * v[0] + 2.0 * a[0][1] * v[0] * v[1] + a[1][1] * v[1] * v[1]).sqrt()
            }
        }
    }

    /// Dual norm `sqrt(a^ij b_i b_j)` of a covector.
    pub fn dual_norm(&self, p: [f64; 2], b: [f64; 2]) -> f64 {
        match self {
            MetricField::Euclidean => b[0].hypot(b[1]),
            _ => {
                let a = self.tensor(p);
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                let inv = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
                (inv[0][0] * b[0] * b[0] + 2.0 * inv[0][1] * b[0] * b[1] + inv[1][1] * b[1] * b[1]).sqrt()
            }
        }
    }

    /// `Err` with the reason when `a` is not finite, symmetric and positive definite.
    pub(crate) fn check_spd(&self, p: [f64; 2]) -> std::result::Result<(), String> {
        let a = self.tensor(p);
        if a.iter().flatten().any(|v| !v.is_finite()) {
            return Err("metric tensor is not finite".into());
        }
        if a[0][1] != a[1][0] {
            return Err(format!("metric tensor is not symmetric: {a:?}"));
        }
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if a[0][0] <= 0.0 || det <= 0.0 {
            return Err(format!("metric tensor is not positive definite: {a:?}"));
        }
        Ok(())
    }
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricField::Euclidean => f.write_str("euclidean"),
            MetricField::Diagonal(a1, a2) => write!(f, "diag({a1},{a2})"),
            MetricField::Custom(_) => f.write_str("custom"),
        }
    }
}

/// Scalar potential `f`, so that `beta = df`.
#[derive(Clone)]
pub enum ScalarField {
    /// `cx x + cy y`.
    Linear {
        cx: f64,
        cy: f64,
    },
    /// `k |p|`.
    Radial {
        k: f64,
    },
    Custom(Arc<ScalarFn>),
}

impl ScalarField {
    pub fn custom(f: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField::Custom(Arc::new(f))
    }

    pub fn value(&self, p: [f64; 2]) -> f64 {
        match self {
            ScalarField::Linear { cx, cy } => cx * p[0] + cy * p[1],
            ScalarField::Radial { k } => k * p[0].hypot(p[1]),
            ScalarField::Custom(f) => f(p),
        }
    }

    /// `df` at `p`: analytic for builtins, central differences otherwise.
    pub fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            ScalarField::Linear { cx, cy } => [*cx, *cy],
            ScalarField::Radial { k } => {
                let r = p[0].hypot(p[1]);
                if r == 0.0 {
                    // df is undefined at the origin; its norm is still |k|.
                    [*k, 0.0]
                } else {
                    [k * p[0] / r, k * p[1] / r]
                }
            }
            ScalarField::Custom(f) => {
                let h = GRADIENT_STEP;
                [
                    (f([p[0] + h, p[1]]) - f([p[0] - h, p[1]])) / (2.0 * h),
                    (f([p[0], p[1] + h]) - f([p[0], p[1] - h])) / (2.0 * h),
                ]
            }
        }
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Linear { cx, cy } => write!(f, "linear({cx},{cy})"),
            ScalarField::Radial { k } => write!(f, "radial({k})"),
            ScalarField::Custom(_) => f.write_str("custom"),
        }
    }
}

/// Covector field `x -> (b_1(x), b_2(x))`.
#[derive(Clone)]
pub enum CovectorField {
    Constant([f64; 2]),
    /// `lambda dtheta = lambda (-y, x) / r^2` around the origin.
    DTheta {
        lambda: f64,
    },
    Custom(Arc<CovectorFn>),
}

impl CovectorField {
    pub fn custom(f: impl Fn([f64; 2]) -> [f64; 2] + Send + Sync + 'static) -> Self {
        CovectorField::Custom(Arc::new(f))
    }

    pub fn value(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            CovectorField::Constant(b) => *b,
            CovectorField::DTheta { lambda } => {
                let r2 = p[0] * p[0] + p[1] * p[1];
                [-lambda * p[1] / r2, lambda * p[0] / r2]
            }
            CovectorField::Custom(f) => f(p),
        }
    }
}

impl fmt::Debug for CovectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CovectorField::Constant(b) => write!(f, "constant({},{})", b[0], b[1]),
            CovectorField::DTheta { lambda } => write!(f, "dtheta({lambda})"),
            CovectorField::Custom(_) => f.write_str("custom"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum OneForm {
    Zero,
    /// `beta = df`.
    Potential(ScalarField),
    Components(CovectorField),
}

impl OneForm {
    /// Covector value at `p`.
    pub fn covector(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            OneForm::Zero => [0.0, 0.0],
            OneForm::Potential(f) => f.gradient(p),
            OneForm::Components(b) => b.value(p),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, OneForm::Zero)
    }

    pub fn potential(&self) -> Option<&ScalarField> {
        match self {
            OneForm::Potential(f) => Some(f),
            _ => None,
        }
    }
}

/// Splits `name(a, b, ...)` into the name and its numeric arguments.
fn parse_call(s: &str) -> Result<(&str, Vec<f64>)> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return Ok((s, Vec::new()));
    };
    if !s.ends_with(')') {
        return Err(Error::parse(s, "missing closing parenthesis"));
    }
    let name = s[..open].trim();
    let inner = &s[open + 1..s.len() - 1];
    if inner.trim().is_empty() {
        return Ok((name, Vec::new()));
    }
    let args = inner
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|e| Error::parse(s, format!("argument {:?}: {e}", a.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((name, args))
}

fn expect_args(spec: &str, args: &[f64], n: usize) -> Result<()> {
    if args.len() != n {
        return Err(Error::parse(
            spec,
            format!("expected {n} arguments, got {}", args.len()),
        ));
    }
    Ok(())
}

impl FromStr for MetricField {
    type Err = Error;

    /// `euclidean` or `diag(a1,a2)`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = parse_call(s)?;
        match name {
            "euclidean" => {
                expect_args(s, &args, 0)?;
                Ok(MetricField::Euclidean)
            }
            "diag" => {
                expect_args(s, &args, 2)?;
                Ok(MetricField::Diagonal(args[0], args[1]))
            }
            _ => Err(Error::parse(
                s,
                "unknown metric field (expected euclidean or diag(a1,a2))",
            )),
        }
    }
}

impl FromStr for OneForm {
    type Err = Error;

    /// `zero`, `potential:linear(cx,cy)`, `potential:radial(k)`,
    /// `dtheta(lambda)` or `constant(b1,b2)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("potential:") {
            let (name, args) = parse_call(rest)?;
            return match name {
                "linear" => {
                    expect_args(s, &args, 2)?;
                    Ok(OneForm::Potential(ScalarField::Linear {
                        cx: args[0],
                        cy: args[1],
                    }))
                }
                "radial" => {
                    expect_args(s, &args, 1)?;
                    Ok(OneForm::Potential(ScalarField::Radial { k: args[0] }))
                }
                _ => Err(Error::parse(
                    s,
                    "unknown potential (expected linear(cx,cy) or radial(k))",
                )),
            };
        }
        let (name, args) = parse_call(s)?;
        match name {
            "zero" | "none" => {
                expect_args(s, &args, 0)?;
                Ok(OneForm::Zero)
            }
            "dtheta" => {
                expect_args(s, &args, 1)?;
                Ok(OneForm::Components(CovectorField::DTheta { lambda: args[0] }))
            }
            "constant" => {
                expect_args(s, &args, 2)?;
                Ok(OneForm::Components(CovectorField::Constant([args[0], args[1]])))
            }
            _ => Err(Error::parse(s, "unknown one-form")),
        }
    }
}
