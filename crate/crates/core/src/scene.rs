//! Rooms, hotspots and stripe geometries.
//!
//! Materializes element positions for the parameterized shapes (regular
//! polygon, straight line) and the two central benchmark arrays, and checks
//! the physical spacing constraints a stripe must satisfy.

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Scalar};

/// Spatial tolerance used by the spacing checks, meters.
const SPACING_TOL: f64 = 1e-9;

/// An energy hotspot: a point where harvesting devices cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Hotspot<S> {
    /// Center of the hotspot, meters.
    pub position: [S; 3],
    /// Expected number of devices in the hotspot (> 0).
    pub density: S,
    /// Radius of the disc users are drawn from, meters.
    pub user_radius: S,
}

impl<S: Scalar> Hotspot<S> {
    /// Hotspot with the default 0.5 m user radius.
    pub fn new(position: [S; 3], density: S) -> Self {
        Self {
            position,
            density,
            user_radius: lit(0.5),
        }
    }
}

/// The optimization input: room, hotspots and system parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<S> {
    /// Room extent along x, meters.
    pub room_width: S,
    /// Room extent along y, meters.
    pub room_depth: S,
    /// Ceiling height, meters. All stripe elements sit at this height.
    pub ceiling_height: S,
    /// Energy hotspots (at least one).
    pub hotspots: Vec<Hotspot<S>>,
    /// Carrier frequency, hertz.
    pub frequency: S,
    /// Boresight gain exponent of the element radiation profile.
    pub boresight_gain: S,
    /// Total transmit power budget, watts.
    pub power_budget: S,
    /// Inter-element spacing along the stripe, meters.
    pub spacing: S,
}

impl<S: Scalar> Scenario<S> {
    /// Horizontal center of the room footprint.
    pub fn room_center(&self) -> [S; 2] {
        let half = lit::<S>(0.5);
        [self.room_width * half, self.room_depth * half]
    }

    /// Number of hotspots.
    pub fn num_hotspots(&self) -> usize {
        self.hotspots.len()
    }

    /// Check every scenario invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        let pos = |v: S, name: &str| -> Result<()> {
            if v > S::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidScenario(format!(
                    "{name} must be strictly positive, got {v}"
                )))
            }
        };
        pos(self.room_width, "room.width")?;
        pos(self.room_depth, "room.depth")?;
        pos(self.ceiling_height, "room.height")?;
        pos(self.frequency, "frequency")?;
        pos(self.power_budget, "power_budget")?;
        pos(self.spacing, "kappa")?;
        if self.boresight_gain < S::zero() {
            return Err(Error::InvalidScenario(format!(
                "b must be non-negative, got {}",
                self.boresight_gain
            )));
        }
        if self.hotspots.is_empty() {
            return Err(Error::InvalidScenario(
                "at least one hotspot is required".into(),
            ));
        }
        for (i, h) in self.hotspots.iter().enumerate() {
            let [x, y, z] = h.position;
            if x < S::zero() || x > self.room_width || y < S::zero() || y > self.room_depth {
                return Err(Error::InvalidScenario(format!(
                    "hotspots[{i}] lies outside the room footprint"
                )));
            }
            // z >= 0 keeps every hotspot coordinate usable as a positive
            // constant in the deployment GP after the room shift.
            if z < S::zero() || z >= self.ceiling_height {
                return Err(Error::InvalidScenario(format!(
                    "hotspots[{i}].z must satisfy 0 <= z < room.height"
                )));
            }
            if h.density <= S::zero() {
                return Err(Error::InvalidScenario(format!(
                    "hotspots[{i}].k must be strictly positive"
                )));
            }
            if h.user_radius < S::zero() {
                return Err(Error::InvalidScenario(format!(
                    "hotspots[{i}].radius must be non-negative"
                )));
            }
        }
        Ok(())
    }

    /// The bundled demo scenario: an 8 m x 8 m room with a 4 m ceiling and
    /// seven table-height hotspots. Coordinates are illustrative config data.
    pub fn default_indoor() -> Self {
        let table = |x: f64, y: f64| Hotspot::new([lit(x), lit(y), lit(1.0)], S::one());
        Scenario {
            room_width: lit(8.0),
            room_depth: lit(8.0),
            ceiling_height: lit(4.0),
            hotspots: vec![
                table(1.5, 1.5),
                table(1.5, 6.5),
                table(6.5, 1.5),
                table(6.5, 6.5),
                table(4.0, 2.0),
                table(4.0, 6.0),
                table(6.5, 4.0),
            ],
            frequency: lit(10e9),
            boresight_gain: lit(2.0),
            power_budget: S::one(),
            spacing: lit(crate::scalar::SPEED_OF_LIGHT / 10e9 / 2.0),
        }
    }
}

/// Which family a deployment belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeTag {
    Polygon,
    Line,
    CenterSquareStripe,
    CenterFdArray,
}

impl ShapeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ShapeTag::Polygon => "polygon",
            ShapeTag::Line => "line",
            ShapeTag::CenterSquareStripe => "center_square_stripe",
            ShapeTag::CenterFdArray => "center_fd_array",
        }
    }
}

impl std::str::FromStr for ShapeTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polygon" => Ok(ShapeTag::Polygon),
            "line" => Ok(ShapeTag::Line),
            "center_square_stripe" => Ok(ShapeTag::CenterSquareStripe),
            "center_fd_array" => Ok(ShapeTag::CenterFdArray),
            other => Err(Error::InvalidShape(format!("unknown shape tag `{other}`"))),
        }
    }
}

/// Materialized element positions of one transmit array.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment<S> {
    /// Ordered element positions, meters. Third coordinate is the ceiling height.
    pub elements: Vec<[S; 3]>,
    pub shape: ShapeTag,
}

impl<S: Scalar> Deployment<S> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Horizontal centroid of the elements.
    pub fn centroid(&self) -> [S; 2] {
        let n = count::<S>(self.elements.len().max(1));
        let mut cx = S::zero();
        let mut cy = S::zero();
        for e in &self.elements {
            cx += e[0];
            cy += e[1];
        }
        [cx / n, cy / n]
    }
}

/// Result of checking a deployment against the stripe spacing constraints.
#[derive(Debug, Clone)]
pub struct ValidationReport<S> {
    /// Total consecutive-element path length, meters.
    pub path_length: S,
    /// Allowed path length `(N - 1) * kappa`, meters.
    pub path_limit: S,
    /// Path-length constraint satisfied (within tolerance).
    pub path_ok: bool,
    /// Minimum-distance constraint satisfied for all pairs.
    pub min_spacing_ok: bool,
    /// Element index pairs closer than `kappa` (empty when `min_spacing_ok`).
    pub spacing_violations: Vec<(usize, usize)>,
    /// True when the minimum-distance check does not apply to this shape.
    pub spacing_waived: bool,
}

impl<S> ValidationReport<S> {
    pub fn all_ok(&self) -> bool {
        self.path_ok && self.min_spacing_ok
    }
}

fn dist3<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> S {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Circumradius of a regular polygon with `n` vertices and side `kappa`.
pub fn polygon_radius<S: Scalar>(n: usize, kappa: S) -> Result<S> {
    if n < 3 {
        return Err(Error::InvalidShape(format!(
            "a regular polygon needs at least 3 elements, got {n}"
        )));
    }
    if kappa <= S::zero() {
        return Err(Error::Domain("kappa must be strictly positive".into()));
    }
    Ok(kappa / (lit::<S>(2.0) * (S::PI() / count::<S>(n)).sin()))
}

/// Place `n` elements on a regular polygon around `center` at the ceiling.
///
/// The rotation angle is fixed to zero; the first element sits at
/// `center + (r0, 0)`.
pub fn place_polygon<S: Scalar>(
    center: [S; 2],
    n: usize,
    kappa: S,
    h_c: S,
) -> Result<Deployment<S>> {
    let r0 = polygon_radius(n, kappa)?;
    let phi = lit::<S>(2.0) * S::PI() / count::<S>(n);
    let elements = (1..=n)
        .map(|j| {
            let a = phi * count::<S>(j - 1);
            [center[0] + r0 * a.cos(), center[1] + r0 * a.sin(), h_c]
        })
        .collect();
    Ok(Deployment {
        elements,
        shape: ShapeTag::Polygon,
    })
}

/// Place `n` elements on a straight line through `center` at the ceiling.
///
/// Element `j` (indices `0..n`) is offset by `(j - floor(n/2)) * kappa` along
/// the direction `angle`: the center coincides with element `floor(n/2)` and
/// the placement is symmetric for odd `n`, so the angles `phi` and `phi + pi`
/// describe the same element set.
pub fn place_line<S: Scalar>(
    center: [S; 2],
    angle: S,
    n: usize,
    kappa: S,
    h_c: S,
) -> Result<Deployment<S>> {
    if n == 0 {
        return Err(Error::InvalidShape(
            "a line needs at least 1 element".into(),
        ));
    }
    if kappa <= S::zero() {
        return Err(Error::Domain("kappa must be strictly positive".into()));
    }
    let half = (n / 2) as isize;
    let (sin_a, cos_a) = angle.sin_cos();
    let elements = (0..n as isize)
        .map(|j| {
            let off = lit::<S>((j - half) as f64) * kappa;
            [center[0] + off * cos_a, center[1] + off * sin_a, h_c]
        })
        .collect();
    Ok(Deployment {
        elements,
        shape: ShapeTag::Line,
    })
}

/// Square-shaped stripe benchmark: `n` elements spaced `kappa` apart along
/// the perimeter of a square centered in the room, side `n * kappa / 4`.
pub fn place_center_square_stripe<S: Scalar>(
    scenario: &Scenario<S>,
    n: usize,
    kappa: S,
) -> Result<Deployment<S>> {
    if n < 4 {
        return Err(Error::InvalidShape(format!(
            "square stripe needs at least 4 elements, got {n}"
        )));
    }
    if kappa <= S::zero() {
        return Err(Error::Domain("kappa must be strictly positive".into()));
    }
    let side = count::<S>(n) * kappa / lit(4.0);
    if side > scenario.room_width || side > scenario.room_depth {
        return Err(Error::InvalidShape(format!(
            "square stripe of side {side} m does not fit the room"
        )));
    }
    let [cx, cy] = scenario.room_center();
    let half = side / lit(2.0);
    let (x0, y0) = (cx - half, cy - half);
    let h_c = scenario.ceiling_height;
    let elements = (0..n)
        .map(|idx| {
            // Arc-length position along the perimeter, corner-inclusive start.
            let s = count::<S>(idx) * kappa;
            let leg = (s / side).to_f64().unwrap_or(0.0).floor() as usize;
            let leg = leg.min(3);
            let r = s - count::<S>(leg) * side;
            match leg {
                0 => [x0 + r, y0, h_c],
                1 => [x0 + side, y0 + r, h_c],
                2 => [x0 + side - r, y0 + side, h_c],
                _ => [x0, y0 + side - r, h_c],
            }
        })
        .collect();
    Ok(Deployment {
        elements,
        shape: ShapeTag::CenterSquareStripe,
    })
}

/// Number of elements per side of the square array whose element count is the
/// square number nearest to `n_target` (ties broken downward).
pub fn nearest_square_side(n_target: usize) -> usize {
    let r = (n_target as f64).sqrt().floor() as usize;
    let r = r.max(1);
    let lo = r * r;
    let hi = (r + 1) * (r + 1);
    if n_target - lo <= hi - n_target {
        r
    } else {
        r + 1
    }
}

/// Fully-digital square-array benchmark: an `s x s` grid (`s*s` nearest
/// square to `n_target`) with `spacing` between neighbors, centered in the
/// room at the ceiling.
pub fn place_center_fd_array<S: Scalar>(
    scenario: &Scenario<S>,
    n_target: usize,
    spacing: S,
) -> Result<Deployment<S>> {
    if n_target == 0 {
        return Err(Error::Domain("n_target must be at least 1".into()));
    }
    if spacing <= S::zero() {
        return Err(Error::Domain("spacing must be strictly positive".into()));
    }
    let s = nearest_square_side(n_target);
    let [cx, cy] = scenario.room_center();
    let h_c = scenario.ceiling_height;
    let half_span = count::<S>(s - 1) / lit(2.0);
    let mut elements = Vec::with_capacity(s * s);
    for iy in 0..s {
        for ix in 0..s {
            let ox = (count::<S>(ix) - half_span) * spacing;
            let oy = (count::<S>(iy) - half_span) * spacing;
            elements.push([cx + ox, cy + oy, h_c]);
        }
    }
    Ok(Deployment {
        elements,
        shape: ShapeTag::CenterFdArray,
    })
}

/// Check the consecutive path-length and pairwise minimum-distance
/// constraints of a stripe deployment.
pub fn validate_deployment<S: Scalar>(
    deployment: &Deployment<S>,
    kappa: S,
) -> Result<ValidationReport<S>> {
    let n = deployment.len();
    if n < 2 {
        return Err(Error::Domain("validation needs at least 2 elements".into()));
    }
    let tol = lit::<S>(SPACING_TOL);
    let mut path_length = S::zero();
    for w in deployment.elements.windows(2) {
        path_length += dist3(&w[0], &w[1]);
    }
    let path_limit = count::<S>(n - 1) * kappa;
    let path_ok = path_length <= path_limit + tol;

    let spacing_waived = deployment.shape == ShapeTag::CenterFdArray;
    let mut spacing_violations = Vec::new();
    if !spacing_waived {
        for j in 0..n {
            for k in (j + 1)..n {
                if dist3(&deployment.elements[j], &deployment.elements[k]) < kappa - tol {
                    spacing_violations.push((j, k));
                }
            }
        }
    }
    Ok(ValidationReport {
        path_length,
        path_limit,
        path_ok,
        min_spacing_ok: spacing_violations.is_empty(),
        spacing_violations,
        spacing_waived,
    })
}

/// Number of elements a stripe of physical length `length` holds at spacing
/// `kappa` (endpoint-inclusive).
pub fn elements_from_length<S: Scalar>(length: S, kappa: S) -> Result<usize> {
    if length < S::zero() {
        return Err(Error::Domain("length must be non-negative".into()));
    }
    if kappa <= S::zero() {
        return Err(Error::Domain("kappa must be strictly positive".into()));
    }
    // Tolerant floor so exact multiples of kappa are not lost to rounding.
    let ratio = (length / kappa)
        .to_f64()
        .ok_or_else(|| Error::Domain("length/kappa overflows the scalar type".into()))?;
    Ok((ratio + 1e-9).floor() as usize + 1)
}
