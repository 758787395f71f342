//! Named power-study configurations covering the reference parameter grids
//! at desk scale: H-grids per process kind, lambda-only grids, and the
//! cross-kind comparison.

use tfbm::{ProcessKind, ProcessSpec};

pub struct Preset {
    pub name: String,
    pub null: ProcessSpec,
    pub alts: Vec<ProcessSpec>,
    /// Which parameter varies along the alternative axis ("H" or "lambda").
    pub axis: &'static str,
    pub default_n: usize,
}

fn h_tag(h: f64) -> String {
    // 0.3 -> "H03", 0.7 -> "H07"
    format!("H{:02}", (h * 10.0).round() as u32)
}

fn l_tag(l: f64) -> String {
    if (l - l.round()).abs() < 1e-12 {
        format!("l{}", l.round() as u32)
    } else {
        format!("l{:02}", (l * 10.0).round() as u32)
    }
}

fn grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut x = a;
    while x <= b + 1e-9 {
        v.push((x * 1000.0).round() / 1000.0);
        x += step;
    }
    v
}

fn push_h_grid(out: &mut Vec<Preset>, kind: ProcessKind, h0: f64, l0: f64, alt_h: &[f64]) {
    let null = ProcessSpec::new(kind, h0, l0).unwrap();
    let alts: Vec<ProcessSpec> =
        alt_h.iter().map(|&h| ProcessSpec::new(kind, h, l0).unwrap()).collect();
    out.push(Preset {
        name: format!("paper-fig-{}-{}-{}", kind.label(), h_tag(h0), l_tag(l0)),
        null,
        alts,
        axis: "H",
        default_n: 200,
    });
}

fn push_lambda_grid(out: &mut Vec<Preset>, kind: ProcessKind, h0: f64, l0: f64) {
    let null = ProcessSpec::new(kind, h0, l0).unwrap();
    let alts: Vec<ProcessSpec> = grid(0.1, 3.0, 0.29)
        .into_iter()
        .map(|l| ProcessSpec::new(kind, h0, l).unwrap())
        .collect();
    out.push(Preset {
        name: format!("paper-fig-{}-{}-lgrid", kind.label(), h_tag(h0)),
        null,
        alts,
        axis: "lambda",
        default_n: 200,
    });
}

pub fn all() -> Vec<Preset> {
    let mut out = Vec::new();
    let h_full = grid(0.1, 0.9, 0.1);
    let h_upper = grid(0.55, 0.95, 0.05);
    for kind in [ProcessKind::TfbmI, ProcessKind::TfbmII] {
        for &h0 in &[0.3, 0.7] {
            for &l0 in &[0.3, 2.0] {
                push_h_grid(&mut out, kind, h0, l0, &h_full);
            }
        }
    }
    for &h0 in &[0.7, 0.9] {
        for &l0 in &[0.3, 2.0] {
            push_h_grid(&mut out, ProcessKind::TfbmIII, h0, l0, &h_upper);
        }
    }
    push_lambda_grid(&mut out, ProcessKind::TfbmI, 0.3, 0.3);
    push_lambda_grid(&mut out, ProcessKind::TfbmII, 0.3, 0.3);
    push_lambda_grid(&mut out, ProcessKind::TfbmIII, 0.7, 0.3);
    // cross-kind: TFBMI null against TFBMIII alternatives
    out.push(Preset {
        name: "paper-fig-tfbm1-H07-vs-tfbm3".to_string(),
        null: ProcessSpec::new(ProcessKind::TfbmI, 0.7, 0.3).unwrap(),
        alts: h_upper
            .iter()
            .map(|&h| ProcessSpec::new(ProcessKind::TfbmIII, h, 0.3).unwrap())
            .collect(),
        axis: "H",
        default_n: 200,
    });
    out
}

pub fn lookup(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name == name)
}

pub fn names() -> Vec<String> {
    all().into_iter().map(|p| p.name).collect()
}
