//! Deformed-shape plots: an SVG with the undeformed wireframe in black and
//! the deformed state overlaid in blue, in two projections — side (x-z) and
//! top (x-y). Output is a pure function of the inputs, so identical model
//! and candidate produce byte-identical files.

use std::path::Path;

use crate::error::{FileError, ModelError};
use crate::model::{Candidate, TrussModel};

const PANEL: f64 = 480.0;
const MARGIN: f64 = 48.0;

/// One projection panel: which data axes it draws and where it sits.
struct Panel {
    label: &'static str,
    axes: [usize; 2],
    origin_x: f64,
}

/// Affine map from data coordinates to pixel coordinates (second data axis
/// points up, so it is flipped into SVG's downward y).
struct Transform {
    scale: f64,
    center_data: [f64; 2],
    center_pixel: [f64; 2],
}

impl Transform {
    fn fit(points: &[[f64; 2]], origin_x: f64) -> Transform {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = [(hi[0] - lo[0]).max(1e-9), (hi[1] - lo[1]).max(1e-9)];
        let usable = PANEL - 2.0 * MARGIN;
        let scale = (usable / span[0]).min(usable / span[1]);
        Transform {
            scale,
            center_data: [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0],
            center_pixel: [origin_x + PANEL / 2.0, PANEL / 2.0],
        }
    }

    fn map(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.center_pixel[0] + (p[0] - self.center_data[0]) * self.scale,
            self.center_pixel[1] - (p[1] - self.center_data[1]) * self.scale,
        ]
    }
}

fn project(coords: &[[f64; 3]], axes: [usize; 2]) -> Vec<[f64; 2]> {
    coords.iter().map(|c| [c[axes[0]], c[axes[1]]]).collect()
}

fn line(out: &mut String, a: [f64; 2], b: [f64; 2], class: &str, color: &str, width: f64) {
    out.push_str(&format!(
        "  <line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" class=\"{}\" \
         stroke=\"{}\" stroke-width=\"{}\"/>\n",
        a[0], a[1], b[0], b[1], class, color, width
    ));
}

/// Renders the overlay plot as an SVG document string.
pub fn render_svg(model: &TrussModel, candidate: &Candidate) -> Result<String, ModelError> {
    let undeformed: Vec<[f64; 3]> = model.nodes().iter().map(|n| n.coords).collect();
    let deformed = model.deformed_coordinates(candidate)?;
    let width = 2.0 * PANEL;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {PANEL}\" \
         width=\"{width}\" height=\"{PANEL}\">\n"
    ));
    out.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    let panels = [
        Panel { label: "side (x-z)", axes: [0, 2], origin_x: 0.0 },
        Panel { label: "top (x-y)", axes: [0, 1], origin_x: PANEL },
    ];
    for panel in panels {
        let u2 = project(&undeformed, panel.axes);
        let d2 = project(&deformed, panel.axes);
        let all: Vec<[f64; 2]> = u2.iter().chain(d2.iter()).copied().collect();
        let transform = Transform::fit(&all, panel.origin_x);

        out.push_str(&format!(
            "  <text x=\"{:.3}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
             text-anchor=\"middle\">{}</text>\n",
            panel.origin_x + PANEL / 2.0,
            panel.label
        ));
        for &(a, b) in model.member_node_indices() {
            line(
                &mut out,
                transform.map(u2[a]),
                transform.map(u2[b]),
                "undeformed",
                "black",
                1.5,
            );
        }
        for (i, node) in model.nodes().iter().enumerate() {
            let p = transform.map(u2[i]);
            if node.fixed.iter().all(|&f| f) {
                out.push_str(&format!(
                    "  <rect x=\"{:.3}\" y=\"{:.3}\" width=\"7\" height=\"7\" fill=\"black\"/>\n",
                    p[0] - 3.5,
                    p[1] - 3.5
                ));
            }
        }
        for &(a, b) in model.member_node_indices() {
            line(&mut out, transform.map(d2[a]), transform.map(d2[b]), "deformed", "blue", 1.2);
        }
        for (i, node) in model.nodes().iter().enumerate() {
            if node.fixed.iter().any(|&f| !f) {
                let p = transform.map(d2[i]);
                out.push_str(&format!(
                    "  <circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"blue\"/>\n",
                    p[0], p[1]
                ));
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Renders and writes the overlay plot to `path`.
pub fn emit_svg(model: &TrussModel, candidate: &Candidate, path: &Path) -> Result<(), FileError> {
    let svg = render_svg(model, candidate)?;
    std::fs::write(path, svg).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })
}
