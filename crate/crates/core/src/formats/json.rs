use serde_json::{json, Value};

use super::spx::format_table;
use crate::model::{compute_stats, format_rational, Instance};

/// JSON view of an instance. Variables are 1-based and every rational is a
/// `"p/q"` string.
pub fn instance_to_json(inst: &Instance) -> Value {
    match inst {
        Instance::Lin2(i) => json!({
            "kind": "lin2",
            "n": i.n(),
            "k": i.k(),
            "m": i.terms().len(),
            "terms": i.terms().iter().map(|t| json!({
                "vars": t.vars.iter().map(|v| v + 1).collect::<Vec<_>>(),
                "coef": format_rational(&t.coef),
            })).collect::<Vec<_>>(),
        }),
        Instance::Csp(i) => json!({
            "kind": "csp",
            "n": i.n(),
            "k": i.k(),
            "m": i.constraints().len(),
            "constraints": i.constraints().iter().map(|c| json!({
                "vars": c.vars().iter().map(|v| v + 1).collect::<Vec<_>>(),
                "weight": format_rational(c.weight()),
                "table": format_table(c.table()),
                "satisfied": c.satisfied_count(),
            })).collect::<Vec<_>>(),
        }),
    }
}

/// Instance JSON plus its statistics block for CSP instances.
pub fn instance_with_stats_json(inst: &Instance) -> Value {
    let mut v = instance_to_json(inst);
    if let Instance::Csp(i) = inst {
        v["stats"] = serde_json::to_value(compute_stats(i).summary()).expect("stats serialize");
    }
    v
}
