use std::fmt::Write;

use crate::kernel::{Expr, Process, Program, Stmt};

/// Renders a program as protocol source that parses back to an equal program.
pub fn render(program: &Program) -> String {
    let n = program.n();
    let ids = program.ids();
    let mut out = format!("protocol {}(N = {n}", program.name());
    if ids.iter().enumerate().any(|(i, &id)| id != i as i64 + 1) {
        let list: Vec<String> = ids.iter().map(i64::to_string).collect();
        let _ = write!(out, ", ids = [{}]", list.join(", "));
    }
    out.push_str(") {\n");
    for d in program.domains() {
        let _ = writeln!(out, "  domain {} = {{{}}}", d.name(), d.values().join(", "));
    }
    let procs = program.processes();
    let mut i = 0;
    while i < procs.len() {
        let mut j = i;
        while j + 1 < procs.len() && same_shape(&procs[i], &procs[j + 1]) {
            j += 1;
        }
        let p = &procs[i];
        let _ = writeln!(out, "  process {} in {}..{} {{", p.role, lo(i + 1, n), hi(j + 1, n));
        for v in &p.vars {
            let _ = writeln!(out, "    {} {} : {};", v.kind.keyword(), v.name, v.domain.name());
        }
        for a in &p.actions {
            let _ = writeln!(
                out,
                "    {}: {} -> {};",
                a.name,
                expr(&a.guard, 0),
                stmts(&a.command, "; ")
            );
        }
        out.push_str("  }\n");
        i = j + 1;
    }
    out.push_str("}\n");
    out
}

fn same_shape(a: &Process, b: &Process) -> bool {
    a.role == b.role && a.vars == b.vars && a.actions == b.actions
}

fn lo(pos: usize, n: usize) -> String {
    if pos == n && n > 1 {
        "N".into()
    } else {
        pos.to_string()
    }
}

fn hi(pos: usize, n: usize) -> String {
    if pos == n {
        "N".into()
    } else if pos + 1 == n && pos > 1 {
        "N-1".into()
    } else {
        pos.to_string()
    }
}

fn stmts(list: &[Stmt], sep: &str) -> String {
    list.iter().map(stmt).collect::<Vec<_>>().join(sep)
}

fn stmt(s: &Stmt) -> String {
    match s {
        Stmt::Assign { target, value } => format!("{target} := {}", expr(value, 0)),
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let mut t = format!("if {} then {{ {} }}", expr(cond, 0), stmts(then_branch, "; "));
            if !else_branch.is_empty() {
                let _ = write!(t, " else {{ {} }}", stmts(else_branch, "; "));
            }
            t
        }
    }
}

/// Binding strength: `||` 1, `&&` 2, `!` 3, comparison 4, atoms 5.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Or(..) => 1,
        Expr::And(..) => 2,
        Expr::Not(_) => 3,
        Expr::Eq(..) | Expr::Ne(..) => 4,
        _ => 5,
    }
}

fn expr(e: &Expr, min: u8) -> String {
    let body = match e {
        Expr::Const(b) => b.to_string(),
        Expr::Literal(l) => l.clone(),
        Expr::Var(r) => r.to_string(),
        Expr::Not(x) => format!("!{}", expr(x, 3)),
        Expr::And(a, b) => format!("{} && {}", expr(a, 2), expr(b, 3)),
        Expr::Or(a, b) => format!("{} || {}", expr(a, 1), expr(b, 2)),
        // comparison operands are atoms in the grammar
        Expr::Eq(a, b) => format!("{} = {}", expr(a, 5), expr(b, 5)),
        Expr::Ne(a, b) => format!("{} != {}", expr(a, 5), expr(b, 5)),
    };
    if prec(e) < min {
        format!("({body})")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_protocol, ParseOptions};
    use crate::kernel::{own, right};

    #[test]
    fn parenthesizes_only_where_needed() {
        let e = own("a").or(own("b")).and(own("c").negate());
        assert_eq!(expr(&e, 0), "(self.a || self.b) && !self.c");
        let e = own("a").is(right("a")).negate();
        assert_eq!(expr(&e, 0), "!self.a = right.a");
        let e = own("a").and(own("b").and(own("c")));
        assert_eq!(expr(&e, 0), "self.a && (self.b && self.c)");
    }

    #[test]
    fn round_trips_groups_and_ids() {
        let src = "protocol t(N) {
  process a in 1..1 { output x : bool; go: !self.x -> self.x := true; }
  process m in 2..N-1 { output x : bool; go: left.x && !self.x -> self.x := true; }
  process z in N..N { output x : bool; }
}";
        let opts = ParseOptions {
            n: Some(5),
            ids: Some(vec![3, 1, 4, 5, 9]),
        };
        let p = parse_protocol(src, &opts).unwrap().program;
        let text = render(&p);
        assert!(text.contains("process m in 2..N-1 {"), "{text}");
        assert!(text.contains("ids = [3, 1, 4, 5, 9]"), "{text}");
        let back = parse_protocol(&text, &ParseOptions::default()).unwrap().program;
        assert_eq!(back, p);
    }
}
