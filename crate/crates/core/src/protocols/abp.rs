use std::sync::Arc;

use super::ProtocolBundle;
use crate::error::Result;
use crate::kernel::{
    assign, if_then, left, lit, own, right, Action, Domain, Expr, Process, Program, Stmt, VarKind, VariableDecl,
};
use crate::mapping::StateMapping;
use crate::specs::abp::{iabp, legitimate, sabp};

/// Puts a message into `channel` unless it is full, in which case it is lost.
fn send(channel: Expr, zero: &str, one: &str, bit: Expr) -> Stmt {
    if_then(
        channel.clone().is(lit("empty")),
        vec![if_then(
            bit,
            vec![assign(channel.clone(), lit(one))],
            vec![assign(channel, lit(zero))],
        )],
        vec![],
    )
}

/// Alternating-bit protocol over unit-capacity channels.
pub fn make_abp() -> Result<ProtocolBundle> {
    let b = Domain::shared_bool();
    let data = Arc::new(Domain::new("data", ["empty", "d0", "d1"])?);
    let ack = Arc::new(Domain::new("ack", ["empty", "a0", "a1"])?);

    let ack_matches = right("chqp")
        .is(lit("a0"))
        .and(own("ns").negate())
        .or(right("chqp").is(lit("a1")).and(own("ns")));
    let next = Action::new(
        "next",
        right("chqp").is_not(lit("empty")),
        vec![
            if_then(
                ack_matches,
                vec![
                    assign(own("ns"), own("ns").negate()),
                    send(own("chpq"), "d0", "d1", own("ns")),
                ],
                vec![],
            ),
            assign(right("chqp"), lit("empty")),
        ],
    );
    let timeout = Action::new(
        "timeout",
        own("chpq").is(lit("empty")).and(right("chqp").is(lit("empty"))),
        vec![send(own("chpq"), "d0", "d1", own("ns"))],
    );
    let reply = Action::new(
        "reply",
        left("chpq").is_not(lit("empty")),
        vec![
            assign(own("nr"), left("chpq").is(lit("d1"))),
            send(own("chqp"), "a0", "a1", left("chpq").is(lit("d1"))),
            assign(left("chpq"), lit("empty")),
        ],
    );

    let processes = vec![
        Process {
            index: 1,
            id: 1,
            role: "sender".into(),
            vars: vec![
                VariableDecl::new("ns", b.clone(), VarKind::Output),
                VariableDecl::new("chpq", data.clone(), VarKind::Channel),
            ],
            actions: vec![next, timeout],
        },
        Process {
            index: 2,
            id: 2,
            role: "receiver".into(),
            vars: vec![
                VariableDecl::new("nr", b, VarKind::Output),
                VariableDecl::new("chqp", ack.clone(), VarKind::Channel),
            ],
            actions: vec![reply],
        },
    ];
    let program = Program::new("abp", processes, vec![data, ack])?;
    let mapping = StateMapping::identical(&program)?;
    let schema = Arc::new(program.schema().clone());
    Ok(ProtocolBundle {
        specs: vec![sabp(schema.clone()), iabp(schema.clone())],
        invariants: vec![legitimate(schema)],
        program,
        mapping,
    })
}
