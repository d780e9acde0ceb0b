use super::{check_n, ProtocolBundle};
use crate::error::Result;
use crate::kernel::{assign, left, own, right, Action, Domain, Process, Program, VarKind, VariableDecl};
use crate::mapping::{Rule, StateMapping};
use crate::specs::{fdp, Predicate};

/// Linear alternator on `n` processes.
pub fn make_alternator(n: usize) -> Result<ProtocolBundle> {
    check_n("alternator", n, 3)?;
    let b = Domain::shared_bool();
    let processes = (1..=n)
        .map(|i| {
            let (role, guard) = if i == 1 {
                ("first", own("x").is(right("x")))
            } else if i == n {
                ("last", left("x").is_not(own("x")))
            } else {
                ("middle", own("x").is_not(left("x")).and(own("x").is(right("x"))))
            };
            Process {
                index: i,
                id: i as i64,
                role: role.into(),
                vars: vec![VariableDecl::new("x", b.clone(), VarKind::Internal)],
                actions: vec![Action::new("toggle", guard, vec![assign(own("x"), own("x").negate())])],
            }
        })
        .collect();
    let program = Program::new("la", processes, vec![])?;
    let mapping = StateMapping::rule(&program, Rule::Enabled)?;
    Ok(ProtocolBundle {
        program,
        mapping,
        specs: vec![fdp(n)?],
        invariants: vec![Predicate::always()],
    })
}
