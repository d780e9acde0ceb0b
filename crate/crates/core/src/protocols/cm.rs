use std::collections::BTreeSet;

use super::{check_n, ProtocolBundle};
use crate::error::{Error, Result};
use crate::kernel::{assign, own, Action, Domain, Expr, Process, Program, VarKind, VariableDecl};
use crate::mapping::{Rule, StateMapping};
use crate::specs::{udp, Predicate};

/// Conflict manager on a chain with the given identifiers.
pub fn make_cm(ids: &[i64]) -> Result<ProtocolBundle> {
    check_n("conflict manager", ids.len(), 2)?;
    if ids.iter().collect::<BTreeSet<_>>().len() != ids.len() {
        return Err(Error::InvalidArgument("process identifiers must be unique".into()));
    }
    let b = Domain::shared_bool();
    let processes = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| Process {
            index: i + 1,
            id,
            role: "p".into(),
            vars: vec![VariableDecl::new("access", b.clone(), VarKind::Internal)],
            actions: vec![Action::new(
                "flip",
                Expr::Const(true),
                vec![assign(own("access"), own("access").negate())],
            )],
        })
        .collect();
    let program = Program::new("cm", processes, vec![])?;
    let mapping = StateMapping::rule(&program, Rule::HighestId)?;
    let spec = udp(ids.len())?;
    Ok(ProtocolBundle {
        program,
        mapping,
        specs: vec![spec],
        invariants: vec![Predicate::always()],
    })
}
