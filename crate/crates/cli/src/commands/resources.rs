use std::fmt::Write as _;

use serde::Serialize;
use thermovqa::ansatz::{formulas_apply, measured_resources, resource_formulas, ResourceCount};

use super::default_layers;
use crate::args::{Format, ResourcesArgs};
use crate::error::{CliError, CliResult};
use crate::output::{render_document, write_output};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceReport {
    pub n: usize,
    pub layers_a: usize,
    pub layers_s: usize,
    pub circuit: ResourceCount,
    /// Closed forms, defined for `n > 2`.
    pub formulas: Option<ResourceCount>,
    pub agree: Option<bool>,
    pub note: Option<String>,
}

pub fn resource_report(n: usize, layers_a: usize, layers_s: usize) -> CliResult<ResourceReport> {
    let circuit = measured_resources(n, layers_a, layers_s)?;
    let formulas = resource_formulas(n, layers_a, layers_s);
    let agree = formulas.as_ref().map(|f| *f == circuit);
    let note = (!formulas_apply(n)).then(|| "formulas inapplicable (n > 2 required)".to_string());
    Ok(ResourceReport { n, layers_a, layers_s, circuit, formulas, agree, note })
}

fn render_text(r: &ResourceReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n = {}, l_A = {}, l_S = {}", r.n, r.layers_a, r.layers_s);
    let _ = writeln!(s, "{:<14} {:>10} {:>10}", "quantity", "formula", "circuit");
    let f = r.formulas.as_ref();
    let rows = [
        ("parameters", f.map(|f| f.parameters), r.circuit.parameters),
        ("cnot_gates", f.map(|f| f.cnot_gates), r.circuit.cnot_gates),
        ("sqrt_x_gates", f.map(|f| f.sqrt_x_gates), r.circuit.sqrt_x_gates),
        ("circuit_depth", f.map(|f| f.circuit_depth), r.circuit.circuit_depth),
    ];
    for (name, formula, circuit) in rows {
        let formula = formula.map_or_else(|| "-".to_string(), |v| v.to_string());
        let _ = writeln!(s, "{name:<14} {formula:>10} {circuit:>10}");
    }
    if let Some(note) = &r.note {
        let _ = writeln!(s, "note: {note}");
    }
    s
}

pub fn resources(args: &ResourcesArgs) -> CliResult<()> {
    let config = (args.n, default_layers(args.n, args.layers_a), default_layers(args.n, args.layers_s));
    let report = resource_report(config.0, config.1, config.2)?;
    let bytes = match args.format {
        Format::Text => render_text(&report).into_bytes(),
        Format::Json => {
            #[derive(Serialize)]
            struct Config {
                n: usize,
                layers_a: usize,
                layers_s: usize,
            }
            let c = Config { n: config.0, layers_a: config.1, layers_s: config.2 };
            render_document("resources", &c, &report)?
        }
    };
    write_output(args.output.as_deref(), &bytes)?;
    if report.agree == Some(false) {
        return Err(CliError::Invariant("circuit census disagrees with the closed-form counts".into()));
    }
    Ok(())
}
