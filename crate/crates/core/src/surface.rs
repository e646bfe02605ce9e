//! Stacked-rectangle translation surfaces.
//!
//! Rectangle `R_i` has width 1 and height `c_i`; its vertical sides are glued
//! to each other by translation and its top is glued to the bottom of
//! `R_{i+1}` (cyclically, `R_{k+1} = R_1`) by the IET `T_i`. Flowing in the
//! direction with inverse slope `α = cot θ` from the bottom of `R_1` and
//! recording the first return there gives `S_α`, so the surface is an
//! independent route to [`crate::iet::build_composition`].
//!
//! The flow is advanced one rectangle at a time: crossing `R_i` upward moves
//! the horizontal coordinate by `c_i α` modulo 1 and takes time
//! `c_i √(1 + α²)`.

use serde::Serialize;

use crate::iet::{CompositionSpec, Iet, IetError, SignMode};
use crate::numerics::{Backend, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SurfaceError {
    #[error("height {index} is not positive: {value}")]
    NonPositiveHeight { index: usize, value: String },
    #[error("mixed-sign compositions have no stacked-rectangle surface")]
    MixedSigns,
    #[error("flow direction needs a non-negative inverse slope, got {0}")]
    NegativeDirection(String),
    #[error("start point {0} lies outside [0, 1)")]
    StartOutOfRange(String),
    #[error("trajectory hits a cone point: top of rectangle {rectangle} at x = {x}")]
    Singularity { rectangle: usize, x: String },
    #[error("rationality cannot be decided from fixed-point approximations")]
    RationalityUndecidable,
    #[error("no rectangle {0}")]
    NoSuchRectangle(usize),
    #[error(transparent)]
    Iet(#[from] IetError),
}

/// `k` rectangles of width 1 stacked cyclically and glued by IETs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackedSurface<S> {
    heights: Vec<S>,
    gluings: Vec<Iet<S>>,
    incommensurable: Vec<bool>,
}

impl<S: Scalar> StackedSurface<S> {
    /// Heights `c_i` and gluing maps `T_i` from a positive composition.
    pub fn build(spec: &CompositionSpec<S>) -> Result<Self, SurfaceError> {
        if spec.mode() == SignMode::Mixed {
            return Err(SurfaceError::MixedSigns);
        }
        Self::new(spec.coefficients().to_vec(), spec.iets().to_vec())
    }

    pub fn new(heights: Vec<S>, gluings: Vec<Iet<S>>) -> Result<Self, SurfaceError> {
        if heights.is_empty() {
            return Err(IetError::EmptyComposition.into());
        }
        if heights.len() != gluings.len() {
            return Err(IetError::CoefficientCount {
                iets: gluings.len(),
                coefficients: heights.len(),
            }
            .into());
        }
        if let Some((index, h)) = heights.iter().enumerate().find(|(_, h)| !h.is_positive()) {
            return Err(SurfaceError::NonPositiveHeight {
                index,
                value: h.to_string(),
            });
        }
        let incommensurable = vec![false; heights.len()];
        Ok(StackedSurface {
            heights,
            gluings,
            incommensurable,
        })
    }

    /// Declares heights (1-based indices) to be irrational stand-ins,
    /// incommensurable with every other height. The stored value is then an
    /// approximation used only for the flow.
    pub fn declare_incommensurable(mut self, indices: &[usize]) -> Result<Self, SurfaceError> {
        for &i in indices {
            let slot = i
                .checked_sub(1)
                .and_then(|j| self.incommensurable.get_mut(j));
            *slot.ok_or(SurfaceError::NoSuchRectangle(i))? = true;
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    pub fn heights(&self) -> &[S] {
        &self.heights
    }

    pub fn gluings(&self) -> &[Iet<S>] {
        &self.gluings
    }

    pub fn incommensurable(&self) -> &[bool] {
        &self.incommensurable
    }

    /// Total area `Σ c_i`.
    pub fn area(&self) -> S {
        let first = self.heights[0].clone();
        self.heights[1..].iter().fold(first, |acc, h| acc + h)
    }
}

/// Builds the surface of a positive composition.
pub fn build_surface<S: Scalar>(
    spec: &CompositionSpec<S>,
) -> Result<StackedSurface<S>, SurfaceError> {
    StackedSurface::build(spec)
}

/// Unit-speed flow direction with inverse slope `α = cot θ ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Direction<S> {
    inverse_slope: S,
}

impl<S: Scalar> Direction<S> {
    pub fn new(inverse_slope: S) -> Result<Self, SurfaceError> {
        if inverse_slope.is_negative() {
            return Err(SurfaceError::NegativeDirection(inverse_slope.to_string()));
        }
        Ok(Direction { inverse_slope })
    }

    pub fn inverse_slope(&self) -> &S {
        &self.inverse_slope
    }

    /// `1 + α²`, the squared length of the path over unit height.
    pub fn speed_squared(&self) -> S {
        self.inverse_slope.int_like(1) + &(self.inverse_slope.clone() * &self.inverse_slope)
    }

    /// `sin θ = 1 / √(1 + α²)`.
    pub fn sin_theta(&self) -> f64 {
        1.0 / self.speed_squared().to_f64().sqrt()
    }
}

/// Time spent flowing upward through a total height `rise`.
///
/// The time is `rise · √(1 + α²)`. Its square is always exact; the time
/// itself is available whenever the backend can take the square root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowTime<S> {
    pub rise: S,
    pub speed_squared: S,
    pub elapsed: Option<S>,
}

impl<S: Scalar> FlowTime<S> {
    pub fn squared(&self) -> S {
        self.rise.clone() * &self.rise * &self.speed_squared
    }

    pub fn to_f64(&self) -> f64 {
        self.elapsed
            .as_ref()
            .map_or_else(|| self.squared().to_f64().sqrt(), Scalar::to_f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstReturn<S> {
    pub x1: S,
    pub time: FlowTime<S>,
    /// Rectangles crossed, 1-based, in order.
    pub rectangles: Vec<usize>,
}

/// Flows from `(x0, 0)` on the bottom of `R_1` until the trajectory returns
/// to that transversal.
pub fn first_return<S: Scalar>(
    surface: &StackedSurface<S>,
    dir: &Direction<S>,
    x0: &S,
) -> Result<FirstReturn<S>, SurfaceError> {
    check_start(x0)?;
    let alpha = dir.inverse_slope();
    let speed_squared = dir.speed_squared();
    let speed = speed_squared.sqrt();
    let mut x = x0.clone();
    let mut rise = x0.int_like(0);
    let mut elapsed = speed.as_ref().map(|_| x0.int_like(0));
    let mut rectangles = Vec::with_capacity(surface.len());
    for (i, (height, gluing)) in surface.heights.iter().zip(&surface.gluings).enumerate() {
        rectangles.push(i + 1);
        let top = (x + &(height.clone() * alpha)).mod_one();
        if gluing
            .circle_discontinuities()
            .iter()
            .any(|d| d.near_mod_one(&top))
        {
            return Err(SurfaceError::Singularity {
                rectangle: i + 1,
                x: top.to_string(),
            });
        }
        x = gluing.map(&top);
        rise = rise + height;
        if let (Some(total), Some(s)) = (elapsed.as_mut(), speed.as_ref()) {
            *total = total.clone() + &(height.clone() * s);
        }
    }
    Ok(FirstReturn {
        x1: x,
        time: FlowTime {
            rise,
            speed_squared,
            elapsed,
        },
        rectangles,
    })
}

/// The return time `(Σ c_i) √(1 + α²)`, the same for every start.
pub fn return_time<S: Scalar>(surface: &StackedSurface<S>, dir: &Direction<S>) -> FlowTime<S> {
    let rise = surface.area();
    let speed_squared = dir.speed_squared();
    let elapsed = speed_squared.sqrt().map(|s| rise.clone() * &s);
    FlowTime {
        rise,
        speed_squared,
        elapsed,
    }
}

/// A point where the trajectory meets a rectangle edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TracePoint<S> {
    pub step: usize,
    /// 1-based rectangle index.
    pub rectangle: usize,
    pub x: S,
    pub y: S,
}

/// Edge crossings of the trajectory from `(x0, 0)` in `R_1` up to its first
/// return: entry at each bottom, every exit through the right side, and exit
/// through each top. Unlike [`first_return`] this walks the straight segments
/// geometrically, solving for the height of every side crossing.
pub fn flow_trace<S: Scalar>(
    surface: &StackedSurface<S>,
    dir: &Direction<S>,
    x0: &S,
) -> Result<Vec<TracePoint<S>>, SurfaceError> {
    check_start(x0)?;
    let alpha = dir.inverse_slope();
    let one = x0.int_like(1);
    let mut out = Vec::new();
    let mut x = x0.clone();
    for (i, (height, gluing)) in surface.heights.iter().zip(&surface.gluings).enumerate() {
        let rectangle = i + 1;
        let mut y = x.int_like(0);
        out.push(TracePoint {
            step: out.len(),
            rectangle,
            x: x.clone(),
            y: y.clone(),
        });
        loop {
            // height at which the segment from (x, y) reaches the right side
            let side = (one.clone() - &x)
                .checked_div(alpha)
                .map(|dy| y.clone() + &dy);
            match side {
                Some(y_side) if y_side < *height => {
                    out.push(TracePoint {
                        step: out.len(),
                        rectangle,
                        x: one.clone(),
                        y: y_side.clone(),
                    });
                    x = x.int_like(0);
                    y = y_side;
                }
                _ => {
                    x = x + &(alpha.clone() * &(height.clone() - &y));
                    break;
                }
            }
        }
        out.push(TracePoint {
            step: out.len(),
            rectangle,
            x: x.clone(),
            y: height.clone(),
        });
        if gluing
            .circle_discontinuities()
            .iter()
            .any(|d| d.near_mod_one(&x))
        {
            return Err(SurfaceError::Singularity {
                rectangle,
                x: x.to_string(),
            });
        }
        x = gluing.map(&x.mod_one());
    }
    out.push(TracePoint {
        step: out.len(),
        rectangle: 1,
        x,
        y: x0.int_like(0),
    });
    Ok(out)
}

fn check_start<S: Scalar>(x0: &S) -> Result<(), SurfaceError> {
    if x0.is_negative() || *x0 >= x0.int_like(1) {
        return Err(SurfaceError::StartOutOfRange(x0.to_string()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareTiled {
    pub verdict: bool,
    pub reason: String,
}

/// Square-tiled iff every gluing length is rational and the heights are
/// pairwise commensurable.
///
/// Only exact inputs can be judged; fixed-point surfaces are rejected.
pub fn is_square_tiled<S: Scalar>(
    surface: &StackedSurface<S>,
) -> Result<SquareTiled, SurfaceError> {
    if S::BACKEND == Backend::Fixed {
        return Err(SurfaceError::RationalityUndecidable);
    }
    for (i, gluing) in surface.gluings.iter().enumerate() {
        for (j, length) in gluing.lengths().iter().enumerate() {
            if length.to_rational().is_none() {
                return Ok(SquareTiled {
                    verdict: false,
                    reason: format!("length {} of gluing map {} is not rational", j + 1, i + 1),
                });
            }
        }
    }
    if surface.len() > 1 {
        if let Some(i) = surface.incommensurable.iter().position(|&f| f) {
            let other = if i == 0 { 2 } else { 1 };
            return Ok(SquareTiled {
                verdict: false,
                reason: format!(
                    "height {} is declared incommensurable with height {other}",
                    i + 1
                ),
            });
        }
    }
    Ok(SquareTiled {
        verdict: true,
        reason: "all gluing lengths are rational and all heights are commensurable".to_string(),
    })
}

/// One horizontal cylinder per rectangle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cylinder<S> {
    pub height: S,
    pub circumference: S,
    /// `height / circumference`.
    pub modulus: S,
    pub declared_incommensurable: bool,
}

/// Each rectangle, with its sides glued, is a horizontal cylinder of
/// circumference 1, height `c_i` and modulus `c_i`.
pub fn horizontal_cylinders<S: Scalar>(surface: &StackedSurface<S>) -> Vec<Cylinder<S>> {
    surface
        .heights
        .iter()
        .zip(&surface.incommensurable)
        .map(|(h, &flag)| {
            let circumference = h.int_like(1);
            let modulus = h.checked_div(&circumference).expect("unit circumference");
            Cylinder {
                height: h.clone(),
                circumference,
                modulus,
                declared_incommensurable: flag,
            }
        })
        .collect()
}

/// Whether the cylinder moduli are pairwise commensurable (exact backends).
pub fn moduli_commensurable<S: Scalar>(cylinders: &[Cylinder<S>]) -> Result<bool, SurfaceError> {
    if S::BACKEND == Backend::Fixed {
        return Err(SurfaceError::RationalityUndecidable);
    }
    let flagged = cylinders.iter().any(|c| c.declared_incommensurable);
    let rational = cylinders.iter().all(|c| c.modulus.to_rational().is_some());
    Ok(cylinders.len() <= 1 || (!flagged && rational))
}
