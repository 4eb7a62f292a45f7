//! Self-contained SVG renderings of the three summary figures: locality
//! radius and surrogate accuracy against the update period (mean line over
//! a shaded interquartile band), and relative accuracy against normalized
//! update delay, one curve per period.
//!
//! Rendering is a pure function of the parsed CSV rows, with fixed-precision
//! coordinates, so regenerating from unchanged data is byte-identical.

use semcomp_core::experiment::{AgingRecord, SummaryCsvRow};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 616.0;
const TOP: f64 = 46.0;
const BOTTOM: f64 = 360.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

struct Axes {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Axes {
    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.x_lo) / (self.x_hi - self.x_lo) * (RIGHT - LEFT)
    }

    fn y(&self, v: f64) -> f64 {
        BOTTOM - (v - self.y_lo) / (self.y_hi - self.y_lo) * (BOTTOM - TOP)
    }
}

fn c(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 || v.abs() >= 0.1 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

struct Svg {
    body: String,
}

impl Svg {
    fn new(title: &str) -> Svg {
        let mut body = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
        );
        body.push_str(&format!(
            "<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{title}</text>\n",
            (LEFT + RIGHT) / 2.0
        ));
        Svg { body }
    }

    fn frame_and_y_ticks(&mut self, axes: &Axes, y_label: &str) {
        for i in 0..=5 {
            let v = axes.y_lo + (axes.y_hi - axes.y_lo) * i as f64 / 5.0;
            let y = axes.y(v);
            self.body.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#e0e0e0\"/>\n",
                c(LEFT),
                c(y),
                c(RIGHT),
                c(y)
            ));
            self.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                c(LEFT - 6.0),
                c(y + 4.0),
                tick_label(v)
            ));
        }
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>\n",
            c(LEFT),
            c(TOP),
            c(RIGHT - LEFT),
            c(BOTTOM - TOP)
        ));
        self.body.push_str(&format!(
            "<text x=\"16\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" \
             transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
            c((TOP + BOTTOM) / 2.0),
            c((TOP + BOTTOM) / 2.0)
        ));
    }

    fn x_tick(&mut self, axes: &Axes, v: f64, label: &str) {
        let x = axes.x(v);
        self.body.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\"/>\n",
            c(x),
            c(BOTTOM),
            c(x),
            c(BOTTOM + 5.0)
        ));
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{label}</text>\n",
            c(x),
            c(BOTTOM + 18.0)
        ));
    }

    fn x_label(&mut self, label: &str) {
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{label}</text>\n",
            c((LEFT + RIGHT) / 2.0),
            c(HEIGHT - 14.0)
        ));
    }

    fn band(&mut self, points_upper: &[(f64, f64)], points_lower: &[(f64, f64)]) {
        let mut d = String::new();
        for (i, (x, y)) in points_upper.iter().enumerate() {
            d.push_str(if i == 0 { "M" } else { "L" });
            d.push_str(&format!("{},{} ", c(*x), c(*y)));
        }
        for (x, y) in points_lower.iter().rev() {
            d.push_str(&format!("L{},{} ", c(*x), c(*y)));
        }
        d.push('Z');
        self.body.push_str(&format!(
            "<path d=\"{d}\" fill=\"#c8c8c8\" fill-opacity=\"0.7\" stroke=\"none\"/>\n"
        ));
    }

    fn polyline(&mut self, points: &[(f64, f64)], color: &str) {
        let coords: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{},{}", c(*x), c(*y)))
            .collect();
        self.body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
            coords.join(" ")
        ));
    }

    fn dots(&mut self, points: &[(f64, f64)], color: &str) {
        for (x, y) in points {
            self.body.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"2.6\" fill=\"{color}\"/>\n",
                c(*x),
                c(*y)
            ));
        }
    }

    fn legend(&mut self, entries: &[(String, &str)]) {
        for (i, (label, color)) in entries.iter().enumerate() {
            let y = TOP + 14.0 + 16.0 * i as f64;
            self.body.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                c(RIGHT - 120.0),
                c(y),
                c(RIGHT - 96.0),
                c(y)
            ));
            self.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\">{label}</text>\n",
                c(RIGHT - 90.0),
                c(y + 4.0)
            ));
        }
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// Mean line with interquartile band against log-scaled update period.
fn quantile_plot(rows: &[SummaryCsvRow], metric: &str, title: &str, y_label: &str) -> String {
    let series: Vec<&SummaryCsvRow> = rows.iter().filter(|r| r.metric == metric).collect();
    let xs: Vec<f64> = series.iter().map(|r| (r.gamma as f64).log2()).collect();
    let lo = series
        .iter()
        .map(|r| r.q25)
        .fold(f64::INFINITY, f64::min)
        .min(series.iter().map(|r| r.mean).fold(f64::INFINITY, f64::min));
    let hi = series
        .iter()
        .map(|r| r.q75)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(series.iter().map(|r| r.mean).fold(f64::NEG_INFINITY, f64::max));
    let pad = ((hi - lo) * 0.08).max(0.002);
    let axes = Axes {
        x_lo: xs.first().copied().unwrap_or(0.0),
        x_hi: xs.last().copied().unwrap_or(1.0).max(xs.first().copied().unwrap_or(0.0) + 1.0),
        y_lo: lo - pad,
        y_hi: hi + pad,
    };

    let mut svg = Svg::new(title);
    svg.frame_and_y_ticks(&axes, y_label);
    for r in &series {
        svg.x_tick(&axes, (r.gamma as f64).log2(), &r.gamma.to_string());
    }
    svg.x_label("update period (observations, log scale)");

    let upper: Vec<(f64, f64)> = series
        .iter()
        .zip(&xs)
        .map(|(r, &x)| (axes.x(x), axes.y(r.q75)))
        .collect();
    let lower: Vec<(f64, f64)> = series
        .iter()
        .zip(&xs)
        .map(|(r, &x)| (axes.x(x), axes.y(r.q25)))
        .collect();
    svg.band(&upper, &lower);

    let mean: Vec<(f64, f64)> = series
        .iter()
        .zip(&xs)
        .map(|(r, &x)| (axes.x(x), axes.y(r.mean)))
        .collect();
    svg.polyline(&mean, "#1a1a1a");
    svg.dots(&mean, "#1a1a1a");
    svg.finish()
}

pub fn radius_plot(rows: &[SummaryCsvRow]) -> String {
    quantile_plot(
        rows,
        "radius",
        "Locality radius by update period (band: 0.25-0.75 quantiles)",
        "sphere radius",
    )
}

pub fn accuracy_plot(rows: &[SummaryCsvRow]) -> String {
    quantile_plot(
        rows,
        "accuracy",
        "Surrogate accuracy by update period (band: 0.25-0.75 quantiles)",
        "agreement with reference",
    )
}

/// Relative accuracy against delay in update periods, one curve per period.
pub fn aging_plot(records: &[AgingRecord]) -> String {
    let mut gammas: Vec<usize> = records.iter().map(|r| r.gamma).collect();
    gammas.sort_unstable();
    gammas.dedup();

    let x_hi = records
        .iter()
        .map(|r| r.delay_multiple as f64)
        .fold(1.0_f64, f64::max);
    let y_lo = records
        .iter()
        .map(|r| r.relative_accuracy)
        .fold(f64::INFINITY, f64::min);
    let y_hi = records
        .iter()
        .map(|r| r.relative_accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    let pad = ((y_hi - y_lo) * 0.08).max(0.002);
    let axes = Axes {
        x_lo: 0.0,
        x_hi,
        y_lo: y_lo - pad,
        y_hi: y_hi + pad,
    };

    let mut svg = Svg::new("Surrogate aging: relative accuracy by update delay");
    svg.frame_and_y_ticks(&axes, "accuracy relative to delay 0");
    let mut delays: Vec<usize> = records.iter().map(|r| r.delay_multiple).collect();
    delays.sort_unstable();
    delays.dedup();
    for &k in &delays {
        svg.x_tick(&axes, k as f64, &k.to_string());
    }
    svg.x_label("delay (multiples of the update period)");

    let mut legend = Vec::new();
    for (i, &gamma) in gammas.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut series: Vec<&AgingRecord> =
            records.iter().filter(|r| r.gamma == gamma).collect();
        series.sort_by_key(|r| r.delay_multiple);
        let pts: Vec<(f64, f64)> = series
            .iter()
            .map(|r| (axes.x(r.delay_multiple as f64), axes.y(r.relative_accuracy)))
            .collect();
        svg.polyline(&pts, color);
        svg.dots(&pts, color);
        legend.push((format!("period {gamma}"), color));
    }
    svg.legend(&legend);
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<SummaryCsvRow> {
        [5usize, 20, 80]
            .iter()
            .flat_map(|&gamma| {
                let base = gamma as f64 / 100.0;
                vec![
                    SummaryCsvRow {
                        gamma,
                        metric: "radius".into(),
                        mean: base,
                        q25: base * 0.8,
                        q75: base * 1.2,
                        n: 10,
                    },
                    SummaryCsvRow {
                        gamma,
                        metric: "accuracy".into(),
                        mean: 1.0 - base,
                        q25: 1.0 - base * 1.2,
                        q75: 1.0 - base * 0.8,
                        n: 10,
                    },
                ]
            })
            .collect()
    }

    #[test]
    fn rendering_is_deterministic() {
        let rows = sample_rows();
        assert_eq!(radius_plot(&rows), radius_plot(&rows));
        assert_eq!(accuracy_plot(&rows), accuracy_plot(&rows));
    }

    #[test]
    fn one_dot_per_summary_row() {
        let rows = sample_rows();
        let svg = radius_plot(&rows);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<path").count(), 1, "one quantile band");
        assert!(svg.contains(">5<") && svg.contains(">20<") && svg.contains(">80<"));
    }

    #[test]
    fn aging_plot_has_one_curve_per_gamma() {
        let records: Vec<AgingRecord> = [5usize, 20]
            .iter()
            .flat_map(|&gamma| {
                (0..4).map(move |k| AgingRecord {
                    gamma,
                    delay_multiple: k,
                    relative_accuracy: 1.0 - 0.03 * k as f64,
                    n_windows: 10,
                })
            })
            .collect();
        let svg = aging_plot(&records);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("period 5") && svg.contains("period 20"));
        assert_eq!(svg, aging_plot(&records));
    }
}
