use std::sync::Arc;

use super::{check_n, ProtocolBundle};
use crate::error::Result;
use crate::kernel::{assign, left, lit, own, right, Action, Domain, Expr, Process, Program, VarKind, VariableDecl};
use crate::mapping::StateMapping;
use crate::specs::pif::{ipif, rq_or_rp, spif};

fn act(name: &str, guard: Expr, value: &str) -> Action {
    Action::new(name, guard, vec![assign(own("st"), lit(value))])
}

fn st(e: fn(&str) -> Expr, v: &str) -> Expr {
    e("st").is(lit(v))
}

/// Propagation of information with feedback on a chain of `n` processes.
pub fn make_pif(n: usize) -> Result<ProtocolBundle> {
    check_n("wave protocol", n, 3)?;
    let root = Arc::new(Domain::new("root", ["i", "rq"])?);
    let middle = Arc::new(Domain::new("middle", ["i", "rq", "rp"])?);
    let leaf = Arc::new(Domain::new("leaf", ["i", "rp"])?);
    let processes = (1..=n)
        .map(|j| {
            let (role, domain, actions) = if j == 1 {
                (
                    "root",
                    &root,
                    vec![
                        act("request", st(own, "i").and(st(right, "i")), "rq"),
                        act("clear", st(own, "rq").and(st(right, "rp")), "i"),
                    ],
                )
            } else if j == n {
                (
                    "leaf",
                    &leaf,
                    vec![
                        act("reflect", st(left, "rq").and(st(own, "i")), "rp"),
                        act("reset", st(left, "i").and(st(own, "rp")), "i"),
                    ],
                )
            } else {
                (
                    "middle",
                    &middle,
                    vec![
                        act("forward", st(left, "rq").and(st(own, "i")).and(st(right, "i")), "rq"),
                        act("back", st(left, "rq").and(st(own, "rq")).and(st(right, "rp")), "rp"),
                        act("stop", st(left, "i").and(own("st").is_not(lit("i"))), "i"),
                    ],
                )
            };
            Process {
                index: j,
                id: j as i64,
                role: role.into(),
                vars: vec![VariableDecl::new("st", domain.clone(), VarKind::Output)],
                actions,
            }
        })
        .collect();
    let program = Program::new("pif", processes, vec![root, middle, leaf])?;
    let mapping = StateMapping::identical(&program)?;
    let schema = Arc::new(program.schema().clone());
    Ok(ProtocolBundle {
        specs: vec![spif(schema.clone()), ipif(schema.clone())],
        invariants: vec![rq_or_rp(schema)],
        program,
        mapping,
    })
}
