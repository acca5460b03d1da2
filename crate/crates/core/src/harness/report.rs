use std::fmt::Write;

use super::train::EpochReport;

/// Shortest round-trip formatting so equal values give equal bytes.
fn num(v: f64) -> String {
    format!("{v}")
}

pub fn epochs_csv(reports: &[EpochReport], game_ids: &[String]) -> String {
    let mut s = String::from("epoch");
    for id in game_ids {
        write!(s, ",{id}").unwrap();
    }
    s.push_str(",epoch_score,aggregated,max_score\n");
    for r in reports {
        write!(s, "{}", r.epoch).unwrap();
        for v in &r.per_game {
            write!(s, ",{}", num(*v)).unwrap();
        }
        writeln!(s, ",{},{},{}", num(r.epoch_score), num(r.aggregated), num(r.max_score)).unwrap();
    }
    s
}

pub fn summary_csv(reports: &[EpochReport], scorer_failures: usize) -> String {
    let (agg, max) = reports.last().map_or((0.0, 0.0), |r| (r.aggregated, r.max_score));
    format!(
        "epochs,aggregated,max_score,scorer_failures\n{},{},{},{}\n",
        reports.len(),
        num(agg),
        num(max),
        scorer_failures
    )
}

/// Minimal line chart of epoch score and running max.
pub fn curve_svg(reports: &[EpochReport]) -> String {
    let (w, h, pad) = (640.0, 360.0, 40.0);
    let top = reports
        .iter()
        .map(|r| r.max_score.max(r.epoch_score))
        .fold(1.0f64, f64::max);
    let bottom = reports.iter().map(|r| r.epoch_score).fold(0.0f64, f64::min);
    let n = reports.len().max(2) - 1;
    let x = |i: usize| pad + (w - 2.0 * pad) * i as f64 / n as f64;
    let y = |v: f64| h - pad - (h - 2.0 * pad) * (v - bottom) / (top - bottom);
    let line = |f: &dyn Fn(&EpochReport) -> f64| {
        reports
            .iter()
            .enumerate()
            .map(|(i, r)| format!("{:.1},{:.1}", x(i), y(f(r))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<line x1="{pad}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{pad}" y1="{pad}" x2="{pad}" y2="{b}" stroke="black"/>"#,
        b = h - pad,
        r = w - pad
    )
    .unwrap();
    writeln!(s, r#"<text x="{pad}" y="20" font-family="sans-serif" font-size="12">score per epoch (blue), running max (red); y range {bottom} to {top}</text>"#).unwrap();
    writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#, line(&|r| r.epoch_score)).unwrap();
    writeln!(s, r#"<polyline fill="none" stroke="firebrick" stroke-width="1.5" stroke-dasharray="4 3" points="{}"/>"#, line(&|r| r.max_score)).unwrap();
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reports() -> Vec<EpochReport> {
        vec![
            EpochReport { epoch: 0, per_game: vec![1.0, 0.0], epoch_score: 1.0, aggregated: 1.0, max_score: 1.0 },
            EpochReport { epoch: 1, per_game: vec![2.0, 1.0], epoch_score: 3.0, aggregated: 4.0, max_score: 3.0 },
        ]
    }

    #[test]
    fn csv_layout() {
        let csv = epochs_csv(&reports(), &["a".into(), "b".into()]);
        assert_eq!(csv, "epoch,a,b,epoch_score,aggregated,max_score\n0,1,0,1,1,1\n1,2,1,3,4,3\n");
        assert_eq!(summary_csv(&reports(), 2), "epochs,aggregated,max_score,scorer_failures\n2,4,3,2\n");
    }

    #[test]
    fn svg_is_well_formed() {
        let svg = curve_svg(&reports());
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(curve_svg(&[]).contains("</svg>"));
    }
}
