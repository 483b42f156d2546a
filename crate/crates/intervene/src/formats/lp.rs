//! LP-format dump of a selection instance, for cross-checking against an
//! external MILP solver. Variables: `X_i`, `O_i_j`, `A_i_j`, the update
//! indicators `IDU_i_j`, `IDS_i_j`, `IDA_i_j`, and `Y_k` for the k-th
//! interaction cost. With several experiments every variable gets a `_b`
//! suffix; with capped credit `W_i_j` counts a pair once over the batch.

use std::fmt::Write as _;

use intervene_core::ip::{IpInstance, TermKind};

fn sfx(batches: usize, b: usize) -> String {
    if batches > 1 {
        format!("_{b}")
    } else {
        String::new()
    }
}

fn indicator(kind: TermKind) -> &'static str {
    match kind {
        TermKind::Unknown => "IDU",
        TermKind::SemiDirected => "IDS",
        TermKind::Adjacent => "IDA",
    }
}

fn coef(c: f64) -> String {
    if c >= 0.0 {
        format!("+ {c}")
    } else {
        format!("- {}", -c)
    }
}

pub fn dump_lp(inst: &IpInstance) -> String {
    let k = inst.batch_count();
    let cap = inst.config().batch.cap_edge_credit && k > 1;
    let lambda = inst.config().objective.lambda();
    let costs = inst.costs();
    let viable = inst.viable();
    let mut binaries: Vec<String> = Vec::new();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ n = {}, k_max = {}, experiments = {}, viable = {:?}",
        inst.n(),
        inst.k_max(),
        k,
        viable
    );

    // objective
    let mut obj = Vec::new();
    let mut constant = 0.0;
    for t in inst.terms() {
        if cap {
            obj.push(format!("{} W_{}_{}", coef(t.weight), t.a, t.b));
        } else {
            for b in 0..k {
                obj.push(format!(
                    "{} {}_{}_{}{}",
                    coef(t.weight),
                    indicator(t.kind),
                    t.a,
                    t.b,
                    sfx(k, b)
                ));
            }
        }
    }
    if lambda != 0.0 {
        for b in 0..k {
            for &v in viable {
                let d = costs.intervene(v) - costs.observe(v);
                if d != 0.0 {
                    obj.push(format!("{} X_{v}{}", coef(-lambda * d), sfx(k, b)));
                }
                constant -= lambda * costs.observe(v);
            }
            for (i, it) in costs.interactions().iter().enumerate() {
                obj.push(format!("{} Y_{i}{}", coef(-lambda * it.delta), sfx(k, b)));
            }
        }
    }
    out.push_str("Maximize\n obj:");
    if obj.is_empty() {
        out.push_str(" 0 X_none");
        binaries.push("X_none".into());
    }
    for term in &obj {
        let _ = write!(out, " {term}");
    }
    out.push('\n');
    if constant != 0.0 {
        let _ = writeln!(out, "\\ plus constant {constant}");
    }

    out.push_str("Subject To\n");
    let mut row = 0usize;
    let mut c = |out: &mut String, body: String| {
        row += 1;
        let _ = writeln!(out, " c{row}: {body}");
    };
    for b in 0..k {
        let s = sfx(k, b);
        let x = |v: usize| format!("X_{v}{s}");
        if !viable.is_empty() {
            let sum: Vec<String> = viable.iter().map(|&v| x(v)).collect();
            c(&mut out, format!("{} <= {}", sum.join(" + "), inst.k_max()));
        }
        if let Some(budget) = inst.budget_for(b) {
            let mut lhs = Vec::new();
            let mut rhs = budget;
            for &v in viable {
                lhs.push(format!("{} {}", coef(costs.intervene(v) - costs.observe(v)), x(v)));
                rhs -= costs.observe(v);
            }
            for (i, it) in costs.interactions().iter().enumerate() {
                lhs.push(format!("{} Y_{i}{s}", coef(it.delta)));
            }
            c(&mut out, format!("{} <= {rhs}", lhs.join(" ")));
        }
        for (i, it) in costs.interactions().iter().enumerate() {
            let y = format!("Y_{i}{s}");
            let sum: Vec<String> = it.members.iter().map(|&v| x(v)).collect();
            c(
                &mut out,
                format!("{y} - {} >= -{}", sum.join(" - "), it.members.len() - 1),
            );
            for &v in &it.members {
                c(&mut out, format!("{y} - {} <= 0", x(v)));
            }
            binaries.push(y);
        }
        for (i, j) in inst.orientation_vars() {
            let o = format!("O_{i}_{j}{s}");
            c(&mut out, format!("{o} - {} <= 0", x(i)));
            c(&mut out, format!("{o} + {} <= 1", x(j)));
            c(&mut out, format!("{o} - {} + {} >= 0", x(i), x(j)));
            binaries.push(o);
        }
        for (i, j) in inst.adjacency_vars() {
            let a = format!("A_{i}_{j}{s}");
            c(&mut out, format!("{a} + {} <= 1", x(i)));
            c(&mut out, format!("{a} + {} <= 1", x(j)));
            c(&mut out, format!("{a} + {} + {} >= 1", x(i), x(j)));
            binaries.push(a);
        }
        for t in inst.terms() {
            let (lo, hi) = (t.a.min(t.b), t.a.max(t.b));
            let id = format!("{}_{}_{}{s}", indicator(t.kind), t.a, t.b);
            let feeds = match t.kind {
                TermKind::Unknown => vec![
                    format!("O_{}_{}{s}", t.a, t.b),
                    format!("O_{}_{}{s}", t.b, t.a),
                    format!("A_{lo}_{hi}{s}"),
                ],
                TermKind::SemiDirected => vec![format!("O_{}_{}{s}", t.a, t.b), format!("A_{lo}_{hi}{s}")],
                TermKind::Adjacent => vec![format!("O_{}_{}{s}", t.a, t.b), format!("O_{}_{}{s}", t.b, t.a)],
            };
            c(&mut out, format!("{id} - {} <= 0", feeds.join(" - ")));
            binaries.push(id);
        }
        binaries.extend(viable.iter().map(|&v| x(v)));
    }
    if k > 1 {
        for &v in viable {
            let sum: Vec<String> = (0..k).map(|b| format!("X_{v}{}", sfx(k, b))).collect();
            c(&mut out, format!("{} <= 1", sum.join(" + ")));
        }
        if let Some(total) = inst.config().batch.total_budget {
            let lhs: Vec<String> = (0..k)
                .flat_map(|b| viable.iter().map(move |&v| (b, v)))
                .map(|(b, v)| format!("{} X_{v}{}", coef(costs.intervene(v)), sfx(k, b)))
                .collect();
            c(&mut out, format!("{} <= {total}", lhs.join(" ")));
        }
    }
    if cap {
        for t in inst.terms() {
            let w = format!("W_{}_{}", t.a, t.b);
            let feeds: Vec<String> = (0..k)
                .map(|b| format!("{}_{}_{}{}", indicator(t.kind), t.a, t.b, sfx(k, b)))
                .collect();
            c(&mut out, format!("{w} - {} <= 0", feeds.join(" - ")));
            binaries.push(w);
        }
    }
    out.push_str("Binary\n");
    for v in &binaries {
        let _ = writeln!(out, " {v}");
    }
    out.push_str("End\n");
    out
}
