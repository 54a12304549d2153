//! Plain-SVG rendering of cost curves: axes, grid lines, the normalized
//! cost polyline, and a marker on the optimal threshold. All coordinates
//! are formatted with fixed precision so reruns emit identical bytes.

use crate::policy::CostCurve;
use crate::real::Real;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn x_pos(tau: f64) -> f64 {
    MARGIN_LEFT + tau * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
}

fn y_pos(value: f64) -> f64 {
    let plot = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    HEIGHT - MARGIN_BOTTOM - value * plot
}

/// Render the normalized cost curve as a standalone SVG line chart.
pub fn cost_curve_svg<F: Real>(curve: &CostCurve<F>) -> String {
    let taus: Vec<f64> = curve
        .taus
        .iter()
        .map(|t| t.to_f64().unwrap_or(0.0))
        .collect();
    let values: Vec<f64> = curve
        .normalized_costs
        .iter()
        .map(|v| v.to_f64().unwrap_or(0.0))
        .collect();

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // grid and tick labels at every 0.25
    for i in 0..=4 {
        let v = i as f64 * 0.25;
        let x = x_pos(v);
        let y = y_pos(v);
        svg.push_str(&format!(
            "  <line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#dddddd\"/>\n",
            y_pos(0.0),
            y_pos(1.0)
        ));
        svg.push_str(&format!(
            "  <line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>\n",
            x_pos(0.0),
            x_pos(1.0)
        ));
        svg.push_str(&format!(
            "  <text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333333\">{v:.2}</text>\n",
            y_pos(0.0) + 18.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"end\" fill=\"#333333\">{v:.2}</text>\n",
            x_pos(0.0) - 6.0,
            y + 4.0
        ));
    }

    // axes
    svg.push_str(&format!(
        "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        x_pos(0.0),
        y_pos(0.0),
        x_pos(1.0),
        y_pos(0.0)
    ));
    svg.push_str(&format!(
        "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        x_pos(0.0),
        y_pos(0.0),
        x_pos(0.0),
        y_pos(1.0)
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" fill=\"black\">decision threshold</text>\n",
        x_pos(0.5),
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" fill=\"black\" transform=\"rotate(-90 16 {:.1})\">normalized expected cost</text>\n",
        y_pos(0.5),
        y_pos(0.5)
    ));

    if !taus.is_empty() {
        let points: Vec<String> = taus
            .iter()
            .zip(&values)
            .map(|(&t, &v)| format!("{:.1},{:.1}", x_pos(t), y_pos(v)))
            .collect();
        svg.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"#2b6cb0\" stroke-width=\"1.5\"/>\n",
            points.join(" ")
        ));

        // mark the minimizer (ties resolve to the smallest threshold)
        let mut best = 0usize;
        for i in 1..values.len() {
            if values[i] < values[best] {
                best = i;
            }
        }
        svg.push_str(&format!(
            "  <circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"4\" fill=\"#c53030\"/>\n",
            x_pos(taus[best]),
            y_pos(values[best])
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_is_deterministic_and_wellformed() {
        let curve = CostCurve {
            taus: vec![0.0, 0.5, 1.0],
            mean_costs: vec![5.0, 1.0, 7.0],
            std_errs: vec![0.1, 0.1, 0.1],
            normalized_costs: vec![4.0 / 6.0, 0.0, 1.0],
        };
        let a = cost_curve_svg(&curve);
        let b = cost_curve_svg(&curve);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains("polyline"));
        assert!(a.contains("circle"));
    }
}
