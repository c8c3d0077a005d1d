//! Line charts of `results.csv`, one SVG per metric.

use plotters::prelude::*;

use crate::output::CsvRow;

const PALETTE: [RGBColor; 8] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
    RGBColor(227, 119, 194),
    RGBColor(127, 127, 127),
];

fn y_label(metric: &str) -> &'static str {
    match metric {
        "phi_star" => "information power ratio",
        _ => "bits/channel use",
    }
}

/// Metrics present in `rows`, in first-appearance order.
pub fn metrics(rows: &[CsvRow]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in rows {
        if !out.contains(&r.metric) {
            out.push(r.metric.clone());
        }
    }
    out
}

/// SVG text plotting `metric` against SNR, one line per series.
pub fn render(rows: &[CsvRow], metric: &str) -> anyhow::Result<String> {
    let mut labels: Vec<&str> = Vec::new();
    for r in rows.iter().filter(|r| r.metric == metric) {
        if !labels.contains(&r.scheme.as_str()) {
            labels.push(&r.scheme);
        }
    }
    let points = |label: &str| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r.metric == metric && r.scheme == label)
            .map(|r| (r.snr_db, r.mean))
            .collect()
    };
    let selected: Vec<&CsvRow> = rows.iter().filter(|r| r.metric == metric).collect();
    let (x0, x1) = bounds(selected.iter().map(|r| r.snr_db));
    let (_, y1) = bounds(selected.iter().map(|r| r.mean));
    let y1 = if y1 > 0.0 { y1 * 1.05 } else { 1.0 };

    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (720, 480)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(metric, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(60)
            .build_cartesian_2d(x0..x1, 0f64..y1)
            .map_err(plot_err)?;
        chart
            .configure_mesh()
            .x_desc("SNR (dB)")
            .y_desc(y_label(metric))
            .draw()
            .map_err(plot_err)?;
        for (i, label) in labels.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            chart
                .draw_series(LineSeries::new(points(label), color.stroke_width(2)))
                .map_err(plot_err)?
                .label(*label)
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        }
        chart
            .configure_series_labels()
            .position(SeriesLabelPosition::UpperLeft)
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
    }
    Ok(svg)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn plot_err<E: std::fmt::Debug>(e: E) -> anyhow::Error {
    anyhow::anyhow!("plot rendering failed: {e:?}")
}
