//! Guarded-command programs on chains and their central-daemon step semantics.

mod domain;
mod program;
mod schema;

pub use domain::{Domain, Value, BOOL_DOMAIN};
pub use program::{
    assign, if_then, left, lit, own, right, Action, ActionId, DefectKind, Expr, ExtendedState, ModelError, Process,
    Program, Site, Stmt, VarRef, VariableDecl,
};
pub use schema::{state_cap, ProgramState, Schema, Slot, SpecState, VarKind, DEFAULT_STATE_CAP, STATE_CAP_ENV};

use crate::error::Result;

/// The full state universe of a program, enumerated in canonical order.
#[derive(Debug, Clone)]
pub struct Universe<'a> {
    program: &'a Program,
    size: u64,
}

impl<'a> Universe<'a> {
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn iter(&self) -> impl Iterator<Item = ProgramState> + 'a {
        let program = self.program;
        (0..self.size).map(move |i| program.state_from_index(i))
    }
}

/// Universe of `program`, refused when larger than `cap` states.
pub fn universe_with_cap(program: &Program, cap: u64) -> Result<Universe<'_>> {
    let size = program.schema().checked_size(cap)?;
    Ok(Universe { program, size })
}

/// Universe of `program` under the configured cap (see [`state_cap`]).
pub fn universe(program: &Program) -> Result<Universe<'_>> {
    universe_with_cap(program, state_cap())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::error::Error;

    fn toggles(n: usize) -> Program {
        let b = Domain::shared_bool();
        let procs = (1..=n)
            .map(|i| Process {
                index: i,
                id: i as i64,
                role: "p".into(),
                vars: vec![VariableDecl::new("x", b.clone(), VarKind::Output)],
                actions: vec![Action::new(
                    "flip",
                    Expr::Const(true),
                    vec![assign(own("x"), own("x").negate())],
                )],
            })
            .collect();
        Program::new("toggles", procs, vec![]).unwrap()
    }

    #[test]
    fn apply_rejects_disabled_actions() {
        let b = Domain::shared_bool();
        let p = Program::new(
            "guarded",
            vec![Process {
                index: 1,
                id: 1,
                role: "p".into(),
                vars: vec![VariableDecl::new("x", b, VarKind::Output)],
                actions: vec![Action::new(
                    "set",
                    own("x").negate(),
                    vec![assign(own("x"), Expr::Const(true))],
                )],
            }],
            vec![],
        )
        .unwrap();
        let on = p.parse_state("x.1=1").unwrap();
        let a = p.action_ids()[0];
        assert!(p.enabled_actions(&on).is_empty());
        assert!(matches!(p.apply(&on, a), Err(Error::Contract(_))));
        let off = p.parse_state("x.1=0").unwrap();
        assert_eq!(p.apply(&off, a).unwrap(), on);
    }

    #[test]
    fn universe_cap_refuses() {
        let p = toggles(5);
        assert_eq!(universe_with_cap(&p, 32).unwrap().size(), 32);
        assert!(matches!(
            universe_with_cap(&p, 31),
            Err(Error::StateCap { size: 32, .. })
        ));
    }

    #[test]
    fn extended_state_at_chain_ends() {
        let p = toggles(4);
        let s = p.parse_state("1,0,0,1").unwrap();
        let first = p.extended_state(&s, 1);
        assert_eq!(first.slots, vec![0, 1]);
        let last = p.extended_state(&s, 4);
        assert_eq!(last.values, vec![0, 1]);
        assert_eq!(p.extended_state(&s, 2).values, vec![1, 0, 0]);
    }

    #[test]
    fn validation_reports_each_defect_class() {
        let b = Domain::shared_bool();
        let color = Arc::new(Domain::new("color", ["red", "blue"]).unwrap());
        let proc_with = |vars: Vec<VariableDecl>, actions: Vec<Action>| Process {
            index: 1,
            id: 1,
            role: "p".into(),
            vars,
            actions,
        };
        let check = |proc: Process, kind: DefectKind| {
            let errs = Program::build("t", vec![proc], vec![]).unwrap_err();
            assert!(errs.iter().any(|e| e.kind == kind), "expected {kind:?}, got {errs:?}");
        };
        check(
            proc_with(vec![], vec![Action::new("a", own("y"), vec![])]),
            DefectKind::UndeclaredVar,
        );
        check(
            proc_with(
                vec![VariableDecl::new("x", b.clone(), VarKind::Output)],
                vec![Action::new("a", left("x"), vec![])],
            ),
            DefectKind::MissingNeighbor,
        );
        check(
            proc_with(
                vec![VariableDecl::new("x", b.clone(), VarKind::Input)],
                vec![Action::new(
                    "a",
                    Expr::Const(true),
                    vec![assign(own("x"), Expr::Const(true))],
                )],
            ),
            DefectKind::AssignToInput,
        );
        check(
            proc_with(
                vec![VariableDecl::new("c", color.clone(), VarKind::Output)],
                vec![Action::new("a", own("c").is(lit("green")), vec![])],
            ),
            DefectKind::ValueOutOfDomain,
        );
        check(
            proc_with(
                vec![
                    VariableDecl::new("c", color, VarKind::Output),
                    VariableDecl::new("x", b, VarKind::Output),
                ],
                vec![Action::new("a", own("c").is(own("x")), vec![])],
            ),
            DefectKind::TypeMismatch,
        );
    }

    #[test]
    fn assignment_to_neighbor_needs_channel() {
        let b = Domain::shared_bool();
        let mk = |kind| {
            (1..=2)
                .map(|i| Process {
                    index: i,
                    id: i as i64,
                    role: format!("p{i}"),
                    vars: vec![VariableDecl::new(&format!("v{i}"), b.clone(), kind)],
                    actions: if i == 2 {
                        vec![Action::new(
                            "a",
                            Expr::Const(true),
                            vec![assign(left("v1"), Expr::Const(false))],
                        )]
                    } else {
                        vec![]
                    },
                })
                .collect::<Vec<_>>()
        };
        let errs = Program::build("t", mk(VarKind::Output), vec![]).unwrap_err();
        assert_eq!(errs[0].kind, DefectKind::AssignToNeighbor);
        assert!(Program::build("t", mk(VarKind::Channel), vec![]).is_ok());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let p = toggles(3);
        let mut procs = p.processes().to_vec();
        procs[2].id = 1;
        let errs = Program::build("t", procs, vec![]).unwrap_err();
        assert_eq!(errs[0].kind, DefectKind::DuplicateId);
    }
}
