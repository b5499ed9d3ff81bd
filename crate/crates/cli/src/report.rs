//! Report assembly and rendering.
//!
//! A report carries a canonical JSON object (serde_json's default map keeps
//! keys sorted) and a parallel table rendering; identical inputs produce
//! byte-identical output in either format.

use serde_json::{json, Map, Value};

use equiflow_core::decide::{CipdDecision, PathFieldDecision, Witness};
use equiflow_core::displacement::{DisplacementCertificate, DisplacementMap, Strategy};
use equiflow_core::invariants::EulerReport;
use equiflow_core::matching::{Matching, MorseRow};
use equiflow_core::stratify::Stratification;
use equiflow_core::{GComplex, Subgroup, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
    Both,
}

pub struct Report {
    json: Map<String, Value>,
    table: Vec<String>,
    verdicts: Vec<(String, bool)>,
    warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, input: &str) -> Report {
        let mut json = Map::new();
        json.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
        json.insert("command".into(), json!(command));
        json.insert("input".into(), json!(input));
        let table = vec![format!("equiflow {} -- {}", command, input)];
        Report { json, table, verdicts: Vec::new(), warnings: Vec::new() }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.json.insert(key.to_string(), value);
    }

    pub fn line(&mut self, text: String) {
        self.table.push(text);
    }

    pub fn warn(&mut self, text: String) {
        self.warnings.push(text);
    }

    pub fn verdict(&mut self, name: &str, pass: bool) {
        self.verdicts.push((name.to_string(), pass));
    }

    pub fn any_fail(&self) -> bool {
        self.verdicts.iter().any(|(_, pass)| !pass)
    }

    pub fn render(mut self, format: Format) -> String {
        let verdicts: Map<String, Value> = self
            .verdicts
            .iter()
            .map(|(name, pass)| {
                let word = if name.contains("verify") || name.contains("valid") {
                    if *pass { "PASS" } else { "FAIL" }
                } else if *pass {
                    "YES"
                } else {
                    "NO"
                };
                (name.clone(), json!(word))
            })
            .collect();
        self.json.insert("verdicts".into(), Value::Object(verdicts));
        if !self.warnings.is_empty() {
            self.json.insert("warnings".into(), json!(self.warnings));
        }
        let mut out = String::new();
        if matches!(format, Format::Table | Format::Both) {
            for l in &self.table {
                out.push_str(l);
                out.push('\n');
            }
            if !self.warnings.is_empty() {
                out.push_str("warnings:\n");
                for w in &self.warnings {
                    out.push_str(&format!("  ! {w}\n"));
                }
            }
            for (name, pass) in &self.verdicts {
                let word = if name.contains("verify") || name.contains("valid") {
                    if *pass { "PASS" } else { "FAIL" }
                } else if *pass {
                    "YES"
                } else {
                    "NO"
                };
                out.push_str(&format!("verdict {name}: {word}\n"));
            }
        }
        if matches!(format, Format::Json | Format::Both) {
            out.push_str(&serde_json::to_string_pretty(&Value::Object(self.json)).unwrap());
            out.push('\n');
        }
        out
    }
}

pub fn label(k: &GComplex, h: &Subgroup) -> String {
    h.label(k.group())
}

pub fn complex_summary(r: &mut Report, k: &GComplex) {
    r.set(
        "complex",
        json!({
            "vertices": k.vertex_count(),
            "cells_by_dim": k.counts_by_dim(),
            "dim": k.dim(),
            "chi": k.chi(),
            "regular": k.is_regular(),
            "group_order": k.group().order(),
        }),
    );
    r.line(format!(
        "complex: {} vertices, cells by dim {:?}, chi = {}, group order {}, regular = {}",
        k.vertex_count(),
        k.counts_by_dim(),
        k.chi(),
        k.group().order(),
        k.is_regular()
    ));
}

pub fn stratification_section(r: &mut Report, strat: &Stratification) {
    let k = strat.complex();
    let mut classes = Vec::new();
    r.line("orbit types (larger isotropy first):".into());
    for class in strat.classes() {
        let stratum = strat.stratum(&class.representative).unwrap();
        let comps: Vec<Value> = stratum
            .components
            .iter()
            .map(|c| {
                json!({
                    "id": c.id,
                    "chi_c": c.chi_c,
                    "dim": c.dim,
                    "open_cells": c.open_simplices.len(),
                })
            })
            .collect();
        r.line(format!(
            "  [{}] H={} |H|={} conjugates={} stratum_cells={} components={}",
            class.id,
            label(k, &class.representative),
            class.representative.order(),
            class.conjugates.len(),
            stratum.simplices.len(),
            stratum.components.len(),
        ));
        for c in &stratum.components {
            r.line(format!(
                "      component {}: chi_c = {}, dim {}, {} open cells",
                c.id,
                c.chi_c,
                c.dim,
                c.open_simplices.len()
            ));
        }
        classes.push(json!({
            "class": class.id,
            "representative": class.representative.elements(),
            "label": label(k, &class.representative),
            "order": class.representative.order(),
            "conjugates": class.conjugates.len(),
            "stratum_cells": stratum.simplices.len(),
            "components": comps,
        }));
    }
    r.set("orbit_types", Value::Array(classes));
}

pub fn euler_section(r: &mut Report, k: &GComplex, report: &EulerReport) {
    let mut rows = Vec::new();
    r.line("euler characteristics per orbit type:".into());
    for row in &report.rows {
        r.line(format!(
            "  [{}] H={}: chi(fixed set) = {}, abs_chi = {}, components chi_c = {:?}",
            row.class_id,
            label(k, &row.representative),
            row.chi_fixed,
            row.abs_chi,
            row.components.iter().map(|c| c.1).collect::<Vec<_>>(),
        ));
        let mut value = Map::new();
        value.insert("class".into(), json!(row.class_id));
        value.insert("label".into(), json!(label(k, &row.representative)));
        value.insert("chi_fixed".into(), json!(row.chi_fixed));
        value.insert("abs_chi".into(), json!(row.abs_chi));
        value.insert(
            "components".into(),
            json!(row
                .components
                .iter()
                .map(|&(id, chi, dim, cells)| json!({
                    "id": id, "chi_c": chi, "dim": dim, "open_cells": cells
                }))
                .collect::<Vec<_>>()),
        );
        if let Some(betti) = &row.betti_closures {
            value.insert("betti_closures".into(), json!(betti));
            r.line(format!("      betti of closures: {betti:?}"));
        }
        rows.push(Value::Object(value));
    }
    r.set("euler", Value::Array(rows));
}

fn witness_value(k: &GComplex, w: &Witness) -> Value {
    json!({
        "class": w.class_id,
        "isotropy": label(k, &w.isotropy),
        "component": w.component_id,
        "chi_c": w.chi_c,
        "dim": w.dim,
        "open_cells": w.open_cells,
        "least_simplex": w.least_simplex,
    })
}

pub fn path_field_section(r: &mut Report, k: &GComplex, d: &PathFieldDecision) {
    let per_type: Vec<Value> = d
        .per_type
        .iter()
        .map(|(id, h, abs)| {
            json!({"class": id, "label": label(k, h), "abs_chi": abs})
        })
        .collect();
    r.set("per_orbit_type", Value::Array(per_type));
    for (id, h, abs) in &d.per_type {
        r.line(format!("  [{}] H={}: abs_chi = {}", id, label(k, h), abs));
    }
    if !d.witnesses.is_empty() {
        r.line("obstructing components:".into());
        for w in &d.witnesses {
            r.line(format!(
                "  H={} component {}: chi_c = {} (dim {}, least simplex {:?})",
                label(k, &w.isotropy),
                w.component_id,
                w.chi_c,
                w.dim,
                w.least_simplex
            ));
        }
        r.set(
            "witnesses",
            Value::Array(d.witnesses.iter().map(|w| witness_value(k, w)).collect()),
        );
    }
    r.verdict("path_field", d.verdict == Verdict::Yes);
}

pub fn cipd_section(r: &mut Report, k: &GComplex, d: &CipdDecision) {
    for w in &d.warnings {
        r.warn(format!(
            "orbit type H={} has fixed set of dimension {} (< 2): verdict is advisory there",
            label(k, &w.representative),
            w.fixed_dim.map_or("empty".to_string(), |d| d.to_string()),
        ));
    }
    if !d.violations.is_empty() {
        r.line("violating components (chi_c != 0, closure misses the fixed set):".into());
        for w in &d.violations {
            r.line(format!(
                "  H={} component {}: chi_c = {} (least simplex {:?})",
                label(k, &w.isotropy),
                w.component_id,
                w.chi_c,
                w.least_simplex
            ));
        }
        r.set(
            "violations",
            Value::Array(d.violations.iter().map(|w| witness_value(k, w)).collect()),
        );
    }
    r.verdict("cipd", d.verdict == Verdict::Yes);
}

pub fn matching_section(r: &mut Report, k: &GComplex, m: &Matching, morse: &[MorseRow]) {
    r.line(format!(
        "matching: {} pairs, {} critical cells",
        m.pairs().len(),
        m.critical().len()
    ));
    let critical: Vec<Value> =
        m.critical().iter().map(|&id| json!(k.simplex(id).vertices())).collect();
    let pairs: Vec<Value> = m
        .pairs()
        .iter()
        .map(|&(a, b)| json!([k.simplex(a).vertices(), k.simplex(b).vertices()]))
        .collect();
    r.set(
        "matching",
        json!({
            "pairs": pairs,
            "critical": critical,
        }),
    );
    r.line("per-component critical cells (>= betti sum when closed):".into());
    let rows: Vec<Value> = morse
        .iter()
        .map(|row| {
            r.line(format!(
                "  H={:?} component {}: {} critical, chi_c = {}, betti sum {} ({}closed), gap {}, critical orbits in closure {}",
                row.subgroup,
                row.component_id,
                row.critical_cells,
                row.chi_c,
                row.betti_sum,
                if row.closed { "" } else { "not " },
                row.gap,
                row.critical_orbits_in_closure,
            ));
            json!({
                "subgroup": row.subgroup,
                "component": row.component_id,
                "critical_cells": row.critical_cells,
                "chi_c": row.chi_c,
                "closed": row.closed,
                "betti_sum": row.betti_sum,
                "gap": row.gap,
                "critical_orbits_in_closure": row.critical_orbits_in_closure,
            })
        })
        .collect();
    r.set("morse_report", Value::Array(rows));
}

fn strategy_name(s: Strategy) -> String {
    match s {
        Strategy::Prescribed => "prescribed".into(),
        Strategy::CentralElement(g) => format!("central_element_{g}"),
        Strategy::CircleRotation => "circle_rotation".into(),
        Strategy::Automorphism => "automorphism".into(),
        Strategy::Singular => "singular".into(),
    }
}

pub fn displacement_section(r: &mut Report, k: &GComplex, f: &DisplacementMap) {
    let mut by_strategy: std::collections::BTreeMap<String, usize> = Default::default();
    for id in 0..k.simplex_count() {
        *by_strategy.entry(strategy_name(f.strategy(id))).or_insert(0) += 1;
    }
    r.line(format!(
        "displacement map: {} singular simplices; strategies {:?}",
        f.singular().len(),
        by_strategy
    ));
    r.set(
        "displacement",
        json!({
            "singular_count": f.singular().len(),
            "strategies": by_strategy,
        }),
    );
}

pub fn certificate_section(r: &mut Report, cert: &DisplacementCertificate) {
    r.line(format!(
        "certificate: {} singular, {} flagged chains, {} monotonicity violations, {} equivariance violations",
        cert.singular.len(),
        cert.flagged_chains.len(),
        cert.monotonicity_violations.len(),
        cert.equivariance_violations.len()
    ));
    for note in &cert.notes {
        r.warn(note.clone());
    }
    let orbit_rows: Vec<Value> = cert
        .singular_orbit_rows
        .iter()
        .map(|row| {
            json!({
                "subgroup": row.subgroup,
                "component": row.component_id,
                "singular_orbits": row.singular_orbits,
                "within_bound": row.within_bound,
            })
        })
        .collect();
    if cert.singular_orbit_rows.iter().any(|row| row.singular_orbits > 0) {
        r.line("singular orbits per component closure (target: at most one):".into());
        for row in &cert.singular_orbit_rows {
            if row.singular_orbits > 0 {
                r.line(format!(
                    "  H={:?} component {}: {} singular orbits{}",
                    row.subgroup,
                    row.component_id,
                    row.singular_orbits,
                    if row.within_bound { "" } else { "  (exceeds bound)" }
                ));
            }
        }
    }
    r.set(
        "certificate",
        json!({
            "pass": cert.pass,
            "singular": cert.singular,
            "flagged_chains": cert.flagged_chains.len(),
            "monotonicity_violations": cert.monotonicity_violations,
            "equivariance_violations": cert.equivariance_violations,
            "singular_orbit_rows": orbit_rows,
        }),
    );
    r.verdict("verify_displacement", cert.pass);
}
