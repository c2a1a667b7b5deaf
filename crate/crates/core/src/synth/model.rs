//! Forward-model geometry: a 2D material grid plus acquisition parameters.
//!
//! Models can be built in code or read from a plain-text key-value file:
//!
//! ```text
//! # scalar parameters, one per line
//! width = 2.5            # domain width (m)
//! depth = 0.45           # domain depth (m)
//! cell = 0.0025          # grid cell size (m)
//! fc_mhz = 900           # source center frequency
//! traces = 125
//! time_window_ns = 12
//! # optional: offset, antenna_depth, trace_spacing, scan_start,
//! # output_samples, pml_cells, courant
//!
//! # materials: background first, then rectangles/circles painted in order
//! background eps=1 sigma=1e-10
//! rect x0=0 z0=0.15 x1=2.5 z1=0.45 eps=3 sigma=1e-4
//! circle cx=1.25 cz=0.30 r=0.0375 eps=1 sigma=1e-10
//! ```
//!
//! Coordinates are metres; `x` runs along the survey line, `z` downward
//! from the top of the domain.

use super::SynthError;

/// Speed of light in vacuum, m/s.
pub(crate) const C0: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    /// Relative permittivity, >= 1.
    pub eps_r: f64,
    /// Conductivity in S/m, >= 0.
    pub sigma: f64,
}

pub const AIR: Material = Material {
    eps_r: 1.0,
    sigma: 1e-10,
};

pub const DRY_SAND: Material = Material {
    eps_r: 3.0,
    sigma: 1e-4,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Rect { x0: f64, z0: f64, x1: f64, z1: f64 },
    Circle { cx: f64, cz: f64, r: f64 },
}

impl Shape {
    pub fn contains(&self, x: f64, z: f64) -> bool {
        match *self {
            Shape::Rect { x0, z0, x1, z1 } => x >= x0 && x <= x1 && z >= z0 && z <= z1,
            Shape::Circle { cx, cz, r } => {
                let (dx, dz) = (x - cx, z - cz);
                dx * dx + dz * dz <= r * r
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialRegion {
    pub shape: Shape,
    pub material: Material,
}

/// Full description of a 2D forward simulation: geometry, materials,
/// source and acquisition layout.
#[derive(Debug, Clone)]
pub struct ForwardModel {
    pub width_m: f64,
    pub depth_m: f64,
    /// Square cell size dx = dz, metres.
    pub cell_m: f64,
    pub background: Material,
    /// Painted over the background in order; later regions win.
    pub regions: Vec<MaterialRegion>,
    /// Ricker source center frequency, MHz.
    pub fc_mhz: f64,
    /// Transmitter-receiver separation, metres.
    pub offset_m: f64,
    /// Depth of both antennas below the top of the domain, metres.
    pub antenna_depth_m: f64,
    pub trace_count: usize,
    /// Spacing between trace midpoints, metres.
    pub trace_spacing_m: f64,
    /// x of the first trace midpoint, metres.
    pub scan_start_m: f64,
    pub time_window_ns: f64,
    /// Samples per output trace (the raw series is resampled to this).
    pub output_samples: usize,
    /// Absorbing-boundary thickness in cells.
    pub pml_cells: usize,
    /// Courant safety factor in (0, 1): `dt = courant * cell / (c0 sqrt(2))`.
    pub courant: f64,
}

impl ForwardModel {
    /// Time step in seconds implied by the stability bound.
    pub fn dt_seconds(&self) -> f64 {
        self.courant * self.cell_m / (C0 * std::f64::consts::SQRT_2)
    }

    /// x position of trace midpoint `i`.
    pub fn trace_x(&self, i: usize) -> f64 {
        self.scan_start_m + i as f64 * self.trace_spacing_m
    }

    /// Material at physical point (x, z).
    pub fn material_at(&self, x: f64, z: f64) -> Material {
        let mut m = self.background;
        for region in &self.regions {
            if region.shape.contains(x, z) {
                m = region.material;
            }
        }
        m
    }

    /// Check the model and return dispersion warnings (non-fatal).
    pub fn validate(&self) -> Result<Vec<String>, SynthError> {
        if !(self.cell_m > 0.0) {
            return Err(SynthError::InvalidModel("cell size must be positive".into()));
        }
        if self.width_m < 4.0 * self.cell_m || self.depth_m < 4.0 * self.cell_m {
            return Err(SynthError::InvalidModel(
                "domain must span at least 4 cells in each direction".into(),
            ));
        }
        if !(self.courant > 0.0 && self.courant < 1.0) {
            return Err(SynthError::InvalidModel(format!(
                "courant factor {} violates the stability bound dt <= dx/(c sqrt(2))",
                self.courant
            )));
        }
        if !(self.fc_mhz > 0.0) {
            return Err(SynthError::InvalidModel("source frequency must be positive".into()));
        }
        if self.trace_count < 1 {
            return Err(SynthError::InvalidModel("need at least one trace".into()));
        }
        if self.output_samples < 2 || !(self.time_window_ns > 0.0) {
            return Err(SynthError::InvalidModel(
                "need a positive time window and at least 2 output samples".into(),
            ));
        }
        let mut eps_max = self.background.eps_r;
        for (mat, what) in std::iter::once((self.background, "background"))
            .chain(self.regions.iter().map(|r| (r.material, "region")))
        {
            if !(mat.eps_r >= 1.0) {
                return Err(SynthError::InvalidModel(format!(
                    "{what} permittivity {} < 1",
                    mat.eps_r
                )));
            }
            if !(mat.sigma >= 0.0) {
                return Err(SynthError::InvalidModel(format!(
                    "{what} conductivity {} < 0",
                    mat.sigma
                )));
            }
            eps_max = eps_max.max(mat.eps_r);
        }
        // antennas must sit inside the domain with a small margin
        let margin = 2.0 * self.cell_m;
        let half = self.offset_m / 2.0;
        for i in [0, self.trace_count - 1] {
            let x = self.trace_x(i);
            if x - half < margin || x + half > self.width_m - margin {
                return Err(SynthError::InvalidModel(format!(
                    "antenna pair of trace {i} at x = {x} m falls outside the grid"
                )));
            }
        }
        if self.antenna_depth_m < margin || self.antenna_depth_m > self.depth_m - margin {
            return Err(SynthError::InvalidModel(format!(
                "antenna depth {} m falls outside the grid",
                self.antenna_depth_m
            )));
        }

        let mut warnings = Vec::new();
        // dispersion guard: >= 10 cells per wavelength at fc in the densest
        // medium
        let lambda_min = C0 / (self.fc_mhz * 1e6 * eps_max.sqrt());
        if self.cell_m > lambda_min / 10.0 {
            warnings.push(format!(
                "cell {} m exceeds lambda/10 = {:.4} m at {} MHz (eps_r = {}); \
                 expect numerical dispersion",
                self.cell_m,
                lambda_min / 10.0,
                self.fc_mhz,
                eps_max
            ));
        }
        if self.pml_cells < 6 {
            warnings.push(format!(
                "{} PML cells is thin; boundary reflections may exceed 1 %",
                self.pml_cells
            ));
        }
        Ok(warnings)
    }

    /// Rescale to a coarser/finer grid, keeping the geometry.
    pub fn with_cell(mut self, cell_m: f64) -> Self {
        self.cell_m = cell_m;
        self
    }

    /// Change the trace count, re-spreading the midpoints across the width.
    pub fn with_trace_count(mut self, count: usize) -> Self {
        let (spacing, start) = scan_layout(self.width_m, self.offset_m, self.cell_m, count);
        self.trace_count = count;
        self.trace_spacing_m = spacing;
        self.scan_start_m = start;
        self
    }
}

/// Centered trace layout leaving room for the antenna offset plus a
/// two-cell margin on each side.
fn scan_layout(width: f64, offset: f64, cell: f64, count: usize) -> (f64, f64) {
    let usable = width - offset - 4.0 * cell;
    let spacing = usable / count as f64;
    let start = (width - (count.max(1) - 1) as f64 * spacing) / 2.0;
    (spacing, start)
}

/// The built-in benchmark scene: a 0.15 m air layer over dry sand with a
/// 0.075 m diameter circular air void centered at x = 1.25 m, mid-sand.
/// 125 traces across 2.5 m, 900 MHz source, 0.025 m antenna offset,
/// 0.0025 m cells, 12 ns window.
pub fn sand_void_model() -> ForwardModel {
    let cell = 0.0025;
    let interface_z = 0.15;
    let offset = 0.025;
    let traces = 125;
    let (spacing, start) = scan_layout(2.5, offset, cell, traces);
    ForwardModel {
        width_m: 2.5,
        depth_m: 0.45,
        cell_m: cell,
        background: AIR,
        regions: vec![
            MaterialRegion {
                shape: Shape::Rect {
                    x0: 0.0,
                    z0: interface_z,
                    x1: 2.5,
                    z1: 0.45,
                },
                material: DRY_SAND,
            },
            MaterialRegion {
                shape: Shape::Circle {
                    cx: 1.25,
                    cz: 0.30,
                    r: 0.0375,
                },
                material: AIR,
            },
        ],
        fc_mhz: 900.0,
        offset_m: offset,
        antenna_depth_m: interface_z - 2.0 * cell,
        trace_count: traces,
        trace_spacing_m: spacing,
        scan_start_m: start,
        time_window_ns: 12.0,
        output_samples: 512,
        pml_cells: 10,
        courant: 0.95,
    }
}

/// Parse a model description from the plain-text format documented in the
/// module docs. Unset scalar keys fall back to defaults derived from the
/// required ones.
pub fn parse_model_file(text: &str) -> Result<ForwardModel, SynthError> {
    let mut width = None;
    let mut depth = None;
    let mut cell = None;
    let mut fc = None;
    let mut traces = None;
    let mut window = None;
    let mut offset = None;
    let mut antenna_depth = None;
    let mut spacing = None;
    let mut scan_start = None;
    let mut output_samples = None;
    let mut pml_cells = None;
    let mut courant = None;
    let mut background = None;
    let mut regions = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| SynthError::InvalidModel(format!("line {}: {msg}", lineno + 1));

        let first = line.split_whitespace().next().unwrap();
        match first {
            "background" | "rect" | "circle" => {
                let fields = parse_fields(&line[first.len()..])
                    .map_err(|m| err(m))?;
                let get = |k: &str| -> Result<f64, SynthError> {
                    fields
                        .iter()
                        .find(|(key, _)| key == k)
                        .map(|(_, v)| *v)
                        .ok_or_else(|| err(format!("{first} is missing field `{k}`")))
                };
                let material = Material {
                    eps_r: get("eps")?,
                    sigma: get("sigma")?,
                };
                match first {
                    "background" => background = Some(material),
                    "rect" => regions.push(MaterialRegion {
                        shape: Shape::Rect {
                            x0: get("x0")?,
                            z0: get("z0")?,
                            x1: get("x1")?,
                            z1: get("z1")?,
                        },
                        material,
                    }),
                    _ => regions.push(MaterialRegion {
                        shape: Shape::Circle {
                            cx: get("cx")?,
                            cz: get("cz")?,
                            r: get("r")?,
                        },
                        material,
                    }),
                }
            }
            _ => {
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
                let key = key.trim();
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("`{}` is not a number", value.trim())))?;
                match key {
                    "width" => width = Some(value),
                    "depth" => depth = Some(value),
                    "cell" => cell = Some(value),
                    "fc_mhz" => fc = Some(value),
                    "traces" => traces = Some(value as usize),
                    "time_window_ns" => window = Some(value),
                    "offset" => offset = Some(value),
                    "antenna_depth" => antenna_depth = Some(value),
                    "trace_spacing" => spacing = Some(value),
                    "scan_start" => scan_start = Some(value),
                    "output_samples" => output_samples = Some(value as usize),
                    "pml_cells" => pml_cells = Some(value as usize),
                    "courant" => courant = Some(value),
                    _ => return Err(err(format!("unknown key `{key}`"))),
                }
            }
        }
    }

    let require = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| SynthError::InvalidModel(format!("missing required key `{name}`")))
    };
    let width = require(width, "width")?;
    let depth = require(depth, "depth")?;
    let cell = require(cell, "cell")?;
    let fc = require(fc, "fc_mhz")?;
    let window = require(window, "time_window_ns")?;
    let traces =
        traces.ok_or_else(|| SynthError::InvalidModel("missing required key `traces`".into()))?;

    let offset = offset.unwrap_or(10.0 * cell);
    let (auto_spacing, _) = scan_layout(width, offset, cell, traces);
    let spacing = spacing.unwrap_or(auto_spacing);
    let scan_start =
        scan_start.unwrap_or_else(|| (width - (traces.max(1) - 1) as f64 * spacing) / 2.0);
    Ok(ForwardModel {
        width_m: width,
        depth_m: depth,
        cell_m: cell,
        background: background.unwrap_or(AIR),
        regions,
        fc_mhz: fc,
        offset_m: offset,
        antenna_depth_m: antenna_depth.unwrap_or(2.0 * cell),
        trace_count: traces,
        trace_spacing_m: spacing,
        scan_start_m: scan_start,
        time_window_ns: window,
        output_samples: output_samples.unwrap_or(512),
        pml_cells: pml_cells.unwrap_or(10),
        courant: courant.unwrap_or(0.95),
    })
}

fn parse_fields(rest: &str) -> Result<Vec<(String, f64)>, String> {
    rest.split_whitespace()
        .map(|tok| {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| format!("expected `key=value`, got `{tok}`"))?;
            let value: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
            Ok((k.to_string(), value))
        })
        .collect()
}
