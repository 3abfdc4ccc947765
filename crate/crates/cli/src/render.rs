//! Markdown and CSV views of reports.

use std::collections::BTreeMap;

use biaseval::assoc::Level;
use biaseval::metaeval::CorrelationResult;

use crate::report::{AssocCell, Body, CorrelateResults, PreferResults, Report};

pub const SIGNIFICANCE: f64 = 0.01;

/// Fixed-point with no negative zero.
fn fixed(v: f64, places: usize) -> String {
    let s = format!("{v:.places$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_owned(),
        _ => s,
    }
}

fn star(p: f64) -> &'static str {
    if p <= SIGNIFICANCE {
        "*"
    } else {
        ""
    }
}

fn level_label(level: Level) -> &'static str {
    match level {
        Level::Word => "word",
        Level::Sentence => "sent",
        Level::SentenceUnbleached => "sent (unbleached)",
    }
}

fn unique<'a>(items: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

fn assoc_markdown(cells: &[AssocCell]) -> String {
    let metrics = unique(cells.iter().map(|c| c.metric.as_str()));
    let mut rows: Vec<(&str, Level)> = Vec::new();
    for c in cells {
        if !rows.contains(&(c.test.as_str(), c.level)) {
            rows.push((c.test.as_str(), c.level));
        }
    }
    let mut out = String::from("Effect sizes; * marks p <= 0.01.\n\n| Test | Level |");
    for m in &metrics {
        out.push_str(&format!(" {m} |"));
    }
    out.push_str("\n|---|---|");
    out.push_str(&"---:|".repeat(metrics.len()));
    out.push('\n');
    for (test, level) in rows {
        out.push_str(&format!("| {test} | {} |", level_label(level)));
        for m in &metrics {
            let cell = cells
                .iter()
                .find(|c| c.test == test && c.level == level && c.metric == *m);
            let text = match cell {
                Some(AssocCell { result: Some(r), .. }) => format!("{}{}", fixed(r.effect_size, 2), star(r.p_value)),
                Some(AssocCell { error: Some(_), .. }) => "ERR".into(),
                _ => "".into(),
            };
            out.push_str(&format!(" {text} |"));
        }
        out.push('\n');
    }
    let errors: Vec<&AssocCell> = cells.iter().filter(|c| c.error.is_some()).collect();
    if !errors.is_empty() {
        out.push_str("\nFailed cells:\n\n");
        for c in errors {
            out.push_str(&format!(
                "- {} / {} / {}: {}\n",
                c.test,
                level_label(c.level),
                c.metric,
                c.error.as_deref().unwrap_or_default()
            ));
        }
    }
    out
}

fn prefer_markdown(p: &PreferResults) -> String {
    let mut out = format!(
        "{} (N={})\n\n| Metric | male | female | > | < | = |\n|---|---:|---:|---:|---:|---:|\n",
        p.dataset, p.n
    );
    for row in &p.rows {
        match (&row.report, &row.error) {
            (Some(r), _) if !r.empty => out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} |\n",
                row.metric,
                fixed(r.male_mean, 3),
                fixed(r.female_mean, 3),
                fixed(r.prop_gt, 2),
                fixed(r.prop_lt, 2),
                fixed(r.prop_eq, 2)
            )),
            (Some(_), _) => out.push_str(&format!("| {} | - | - | - | - | - |\n", row.metric)),
            (None, e) => out.push_str(&format!(
                "| {} | ERR: {} | | | | |\n",
                row.metric,
                e.as_deref().unwrap_or_default()
            )),
        }
    }
    out
}

fn corr_cell(c: Option<&CorrelationResult>) -> String {
    match c {
        Some(r) => format!("{}{}", fixed(r.rho, 3), star(r.p_value)),
        None => "ERR".into(),
    }
}

fn correlate_markdown(c: &CorrelateResults) -> String {
    let metrics = unique(c.cells.iter().map(|x| x.metric.as_str()));
    let dims = unique(c.cells.iter().map(|x| x.dimension.as_str()));
    let level = match c.level {
        biaseval::metaeval::CorrelationLevel::Example => "Example",
        biaseval::metaeval::CorrelationLevel::System => "System",
    };
    let mut out = format!(
        "{level}-level Spearman correlation on {} ({}, filter {}); * marks p <= 0.01.\n\n| Metrics |",
        c.dataset,
        c.mode.as_str(),
        serde_json::to_value(c.filter)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    );
    for d in &dims {
        out.push_str(&format!(" {d} origin | {d} swap |"));
    }
    out.push_str("\n|---|");
    out.push_str(&"---:|---:|".repeat(dims.len()));
    out.push('\n');
    for m in &metrics {
        out.push_str(&format!("| {m} |"));
        for d in &dims {
            let cell = c.cells.iter().find(|x| x.metric == *m && x.dimension == *d);
            let (o, s) = match cell {
                Some(x) => (corr_cell(x.origin.as_ref()), corr_cell(x.swapped.as_ref())),
                None => (String::new(), String::new()),
            };
            out.push_str(&format!(" {o} | {s} |"));
        }
        out.push('\n');
    }
    let errors: Vec<_> = c
        .cells
        .iter()
        .filter_map(|x| x.error.as_ref().map(|e| (x, e)))
        .collect();
    if !errors.is_empty() {
        out.push_str("\nFailed cells:\n\n");
        for (x, e) in errors {
            out.push_str(&format!("- {} / {}: {e}\n", x.metric, x.dimension));
        }
    }
    out
}

pub fn markdown(report: &Report) -> String {
    let mut out = format!("<!-- biaseval {} seed {} -->\n\n", report.version, report.seed);
    out.push_str(&match &report.body {
        Body::Assoc(cells) => assoc_markdown(cells),
        Body::Prefer(p) => prefer_markdown(p),
        Body::Correlate(c) => correlate_markdown(c),
    });
    out
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut row = |fields: Vec<String>| w.write_record(&fields).expect("in-memory csv");
    match &report.body {
        Body::Assoc(cells) => {
            row([
                "test",
                "level",
                "metric",
                "effect_size",
                "p_value",
                "s_value",
                "significant",
                "error",
            ]
            .map(String::from)
            .to_vec());
            for c in cells {
                let r = c.result.as_ref();
                row(vec![
                    c.test.clone(),
                    c.level.as_str().into(),
                    c.metric.clone(),
                    opt(r.map(|r| r.effect_size)),
                    opt(r.map(|r| r.p_value)),
                    opt(r.map(|r| r.s_value)),
                    r.map(|r| (r.p_value <= SIGNIFICANCE).to_string()).unwrap_or_default(),
                    c.error.clone().unwrap_or_default(),
                ]);
            }
        }
        Body::Prefer(p) => {
            row(["metric", "n", "male", "female", "gt", "lt", "eq", "error"]
                .map(String::from)
                .to_vec());
            for r in &p.rows {
                let rep = r.report.as_ref().filter(|x| !x.empty);
                row(vec![
                    r.metric.clone(),
                    p.n.to_string(),
                    opt(rep.map(|x| x.male_mean)),
                    opt(rep.map(|x| x.female_mean)),
                    opt(rep.map(|x| x.prop_gt)),
                    opt(rep.map(|x| x.prop_lt)),
                    opt(rep.map(|x| x.prop_eq)),
                    r.error.clone().unwrap_or_default(),
                ]);
            }
        }
        Body::Correlate(c) => {
            row([
                "metric",
                "dimension",
                "rho_origin",
                "p_origin",
                "rho_swap",
                "p_swap",
                "delta",
                "error",
            ]
            .map(String::from)
            .to_vec());
            for x in &c.cells {
                row(vec![
                    x.metric.clone(),
                    x.dimension.clone(),
                    opt(x.origin.map(|r| r.rho)),
                    opt(x.origin.map(|r| r.p_value)),
                    opt(x.swapped.map(|r| r.rho)),
                    opt(x.swapped.map(|r| r.p_value)),
                    opt(x.delta),
                    x.error.clone().unwrap_or_default(),
                ]);
            }
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

/// `metric,dimension,k,rho_origin,rho_swap`, one row per k.
pub fn topk_csv(c: &CorrelateResults) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "dimension", "k", "rho_origin", "rho_swap"])
        .expect("in-memory csv");
    for s in &c.topk {
        let swapped: BTreeMap<usize, Option<f64>> = s.swapped.iter().map(|p| (p.k, p.result.map(|r| r.rho))).collect();
        for p in &s.origin {
            let rho_swap = swapped.get(&p.k).copied().flatten();
            w.write_record([
                s.metric.clone(),
                s.dimension.clone(),
                p.k.to_string(),
                opt(p.result.map(|r| r.rho)),
                opt(rho_swap),
            ])
            .expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}
