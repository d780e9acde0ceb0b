use std::fmt;
use std::sync::Arc;

use super::domain::{Domain, Value};
use super::schema::{ProgramState, Schema, Slot, VarKind};
use crate::error::{Error, Result};

/// Which process of the chain a variable reference names, relative to the
/// process evaluating it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    Own,
    Left,
    Right,
}

impl Site {
    pub fn keyword(self) -> &'static str {
        match self {
            Site::Own => "self",
            Site::Left => "left",
            Site::Right => "right",
        }
    }

    fn resolve(self, position: usize, n: usize) -> Option<usize> {
        match self {
            Site::Own => Some(position),
            Site::Left => (position > 1).then(|| position - 1),
            Site::Right => (position < n).then(|| position + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub site: Site,
    pub name: String,
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.site.keyword(), self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    /// Enumeration literal; its domain is fixed by the other side of the comparison.
    Literal(String),
    Var(VarRef),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Ne(Box<Expr>, Box<Expr>),
}

pub fn own(name: &str) -> Expr {
    Expr::Var(VarRef {
        site: Site::Own,
        name: name.into(),
    })
}

pub fn left(name: &str) -> Expr {
    Expr::Var(VarRef {
        site: Site::Left,
        name: name.into(),
    })
}

pub fn right(name: &str) -> Expr {
    Expr::Var(VarRef {
        site: Site::Right,
        name: name.into(),
    })
}

pub fn lit(value: &str) -> Expr {
    Expr::Literal(value.into())
}

impl Expr {
    pub fn is(self, other: Expr) -> Expr {
        Expr::Eq(Box::new(self), Box::new(other))
    }

    pub fn is_not(self, other: Expr) -> Expr {
        Expr::Ne(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: Expr) -> Expr {
        Expr::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Expr) -> Expr {
        Expr::Or(Box::new(self), Box::new(other))
    }

    pub fn negate(self) -> Expr {
        Expr::Not(Box::new(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign {
        target: VarRef,
        value: Expr,
    },
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
}

pub fn assign(target: Expr, value: Expr) -> Stmt {
    match target {
        Expr::Var(target) => Stmt::Assign { target, value },
        other => panic!("assignment target must be a variable reference, got {other:?}"),
    }
}

pub fn if_then(cond: Expr, then_branch: Vec<Stmt>, else_branch: Vec<Stmt>) -> Stmt {
    Stmt::If {
        cond,
        then_branch,
        else_branch,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub guard: Expr,
    pub command: Vec<Stmt>,
}

impl Action {
    pub fn new(name: &str, guard: Expr, command: Vec<Stmt>) -> Self {
        Self {
            name: name.into(),
            guard,
            command,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub domain: Arc<Domain>,
    pub kind: VarKind,
}

impl VariableDecl {
    pub fn new(name: &str, domain: Arc<Domain>, kind: VarKind) -> Self {
        Self {
            name: name.into(),
            domain,
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    /// Chain position, 1-based.
    pub index: usize,
    pub id: i64,
    /// Positional role label (e.g. `root`, `middle`, `leaf`); groups processes when rendered.
    pub role: String,
    pub vars: Vec<VariableDecl>,
    pub actions: Vec<Action>,
}

/// Defect classes shared by program construction and the protocol parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DefectKind {
    UndeclaredVar,
    MissingNeighbor,
    AssignToInput,
    AssignToNeighbor,
    ValueOutOfDomain,
    TypeMismatch,
    DuplicateDecl,
    DuplicateAction,
    DuplicateId,
    BadChain,
}

impl DefectKind {
    pub fn code(self) -> &'static str {
        match self {
            DefectKind::UndeclaredVar => "UNDECLARED_VAR",
            DefectKind::MissingNeighbor => "MISSING_NEIGHBOR",
            DefectKind::AssignToInput => "ASSIGN_TO_INPUT",
            DefectKind::AssignToNeighbor => "ASSIGN_TO_NEIGHBOR",
            DefectKind::ValueOutOfDomain => "VALUE_OUT_OF_DOMAIN",
            DefectKind::TypeMismatch => "TYPE_MISMATCH",
            DefectKind::DuplicateDecl => "DUPLICATE_DECL",
            DefectKind::DuplicateAction => "DUPLICATE_ACTION",
            DefectKind::DuplicateId => "DUPLICATE_ID",
            DefectKind::BadChain => "BAD_CHAIN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelError {
    pub kind: DefectKind,
    pub position: usize,
    pub action: Option<String>,
    pub message: String,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] process {}", self.kind.code(), self.position)?;
        if let Some(a) = &self.action {
            write!(f, ", action `{a}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Identifies one action of one process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId {
    pub position: usize,
    pub index: usize,
}

#[derive(Debug, Clone)]
enum CExpr {
    Const(Value),
    Slot(usize),
    Not(Box<CExpr>),
    And(Box<CExpr>, Box<CExpr>),
    Or(Box<CExpr>, Box<CExpr>),
    Eq(Box<CExpr>, Box<CExpr>),
    Ne(Box<CExpr>, Box<CExpr>),
}

impl CExpr {
    fn eval(&self, s: &[Value]) -> Value {
        match self {
            CExpr::Const(v) => *v,
            CExpr::Slot(i) => s[*i],
            CExpr::Not(e) => (e.eval(s) == 0) as Value,
            CExpr::And(a, b) => (a.eval(s) != 0 && b.eval(s) != 0) as Value,
            CExpr::Or(a, b) => (a.eval(s) != 0 || b.eval(s) != 0) as Value,
            CExpr::Eq(a, b) => (a.eval(s) == b.eval(s)) as Value,
            CExpr::Ne(a, b) => (a.eval(s) != b.eval(s)) as Value,
        }
    }
}

#[derive(Debug, Clone)]
enum CStmt {
    Assign(usize, CExpr),
    If(CExpr, Vec<CStmt>, Vec<CStmt>),
}

fn exec(stmts: &[CStmt], s: &mut [Value]) {
    for st in stmts {
        match st {
            CStmt::Assign(slot, e) => s[*slot] = e.eval(s),
            CStmt::If(c, t, e) => {
                if c.eval(s) != 0 {
                    exec(t, s)
                } else {
                    exec(e, s)
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct CompiledAction {
    guard: CExpr,
    command: Vec<CStmt>,
    /// Slots the command may write, for frame checks.
    writes: Vec<usize>,
}

/// A validated guarded-command program on a chain, with compiled actions.
#[derive(Debug, Clone)]
pub struct Program {
    name: String,
    processes: Vec<Process>,
    domains: Vec<Arc<Domain>>,
    schema: Arc<Schema>,
    compiled: Arc<Vec<Vec<CompiledAction>>>,
    action_ids: Arc<Vec<ActionId>>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.processes == other.processes
    }
}

impl Eq for Program {}

#[derive(Debug, Clone, PartialEq)]
enum Ty {
    Bool,
    Enum(Arc<Domain>),
    Literal(String),
}

struct Checker<'a> {
    schema: &'a Schema,
    position: usize,
    action: &'a str,
    errors: Vec<ModelError>,
}

impl Checker<'_> {
    fn err(&mut self, kind: DefectKind, message: String) {
        self.errors.push(ModelError {
            kind,
            position: self.position,
            action: Some(self.action.to_string()),
            message,
        });
    }

    fn slot_of(&mut self, r: &VarRef) -> Option<usize> {
        let Some(pos) = r.site.resolve(self.position, self.schema.n()) else {
            self.err(
                DefectKind::MissingNeighbor,
                format!(
                    "`{r}` names a neighbor that does not exist at chain position {}",
                    self.position
                ),
            );
            return None;
        };
        let found = self.schema.find(pos, &r.name);
        if found.is_none() {
            self.err(
                DefectKind::UndeclaredVar,
                format!("`{r}` is not declared by the process at position {pos}"),
            );
        }
        found
    }

    fn typed(&mut self, e: &Expr) -> Option<(Ty, CExpr)> {
        Some(match e {
            Expr::Const(b) => (Ty::Bool, CExpr::Const(*b as Value)),
            Expr::Literal(l) => (Ty::Literal(l.clone()), CExpr::Const(0)),
            Expr::Var(r) => {
                let slot = self.slot_of(r)?;
                let d = &self.schema.slot(slot).domain;
                let ty = if d.is_bool() { Ty::Bool } else { Ty::Enum(d.clone()) };
                (ty, CExpr::Slot(slot))
            }
            Expr::Not(a) => (Ty::Bool, CExpr::Not(Box::new(self.boolean(a)?))),
            Expr::And(a, b) => {
                let (a, b) = (self.boolean(a), self.boolean(b));
                (Ty::Bool, CExpr::And(Box::new(a?), Box::new(b?)))
            }
            Expr::Or(a, b) => {
                let (a, b) = (self.boolean(a), self.boolean(b));
                (Ty::Bool, CExpr::Or(Box::new(a?), Box::new(b?)))
            }
            Expr::Eq(a, b) | Expr::Ne(a, b) => {
                let (ca, cb) = self.comparable(a, b)?;
                let out = if matches!(e, Expr::Eq(..)) {
                    CExpr::Eq(Box::new(ca), Box::new(cb))
                } else {
                    CExpr::Ne(Box::new(ca), Box::new(cb))
                };
                (Ty::Bool, out)
            }
        })
    }

    fn boolean(&mut self, e: &Expr) -> Option<CExpr> {
        let (ty, c) = self.typed(e)?;
        match ty {
            Ty::Bool => Some(c),
            other => {
                self.err(
                    DefectKind::TypeMismatch,
                    format!("expected a boolean, found {}", describe(&other)),
                );
                None
            }
        }
    }

    fn comparable(&mut self, a: &Expr, b: &Expr) -> Option<(CExpr, CExpr)> {
        let ta = self.typed(a);
        let tb = self.typed(b);
        let ((ta, ca), (tb, cb)) = (ta?, tb?);
        match (&ta, &tb) {
            (Ty::Bool, Ty::Bool) => Some((ca, cb)),
            (Ty::Enum(x), Ty::Enum(y)) if x == y => Some((ca, cb)),
            (Ty::Enum(d), Ty::Literal(l)) => Some((ca, self.literal(d, l)?)),
            (Ty::Literal(l), Ty::Enum(d)) => Some((self.literal(d, l)?, cb)),
            _ => {
                self.err(
                    DefectKind::TypeMismatch,
                    format!("cannot compare {} with {}", describe(&ta), describe(&tb)),
                );
                None
            }
        }
    }

    fn literal(&mut self, d: &Domain, l: &str) -> Option<CExpr> {
        match d.lookup(l) {
            Some(v) => Some(CExpr::Const(v)),
            None => {
                self.err(
                    DefectKind::ValueOutOfDomain,
                    format!("`{l}` is not a value of domain `{}`", d.name()),
                );
                None
            }
        }
    }

    fn stmts(&mut self, stmts: &[Stmt], writes: &mut Vec<usize>) -> Option<Vec<CStmt>> {
        let mut out = Vec::new();
        let mut ok = true;
        for st in stmts {
            match self.stmt(st, writes) {
                Some(c) => out.push(c),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn stmt(&mut self, st: &Stmt, writes: &mut Vec<usize>) -> Option<CStmt> {
        match st {
            Stmt::Assign { target, value } => {
                let slot = self.slot_of(target)?;
                let s = self.schema.slot(slot);
                if s.kind == VarKind::Input {
                    self.err(DefectKind::AssignToInput, format!("`{target}` is an input variable"));
                    return None;
                }
                if target.site != Site::Own && s.kind != VarKind::Channel {
                    self.err(
                        DefectKind::AssignToNeighbor,
                        format!("`{target}` belongs to a neighbor and is not a channel"),
                    );
                    return None;
                }
                let domain = s.domain.clone();
                let c = if domain.is_bool() {
                    self.boolean(value)?
                } else {
                    let (ty, c) = self.typed(value)?;
                    match ty {
                        Ty::Enum(d) if d == domain => c,
                        Ty::Literal(l) => self.literal(&domain, &l)?,
                        other => {
                            self.err(
                                DefectKind::TypeMismatch,
                                format!(
                                    "cannot assign {} to `{target}` of domain `{}`",
                                    describe(&other),
                                    domain.name()
                                ),
                            );
                            return None;
                        }
                    }
                };
                writes.push(slot);
                Some(CStmt::Assign(slot, c))
            }
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let c = self.boolean(cond);
                let t = self.stmts(then_branch, writes);
                let e = self.stmts(else_branch, writes);
                Some(CStmt::If(c?, t?, e?))
            }
        }
    }
}

fn describe(t: &Ty) -> String {
    match t {
        Ty::Bool => "a boolean".into(),
        Ty::Enum(d) => format!("a value of domain `{}`", d.name()),
        Ty::Literal(l) => format!("the bare literal `{l}`"),
    }
}

impl Program {
    /// Validates and compiles a program. `domains` lists the user-declared
    /// enumeration domains in declaration order (used when rendering).
    pub fn new(name: &str, processes: Vec<Process>, domains: Vec<Arc<Domain>>) -> Result<Self> {
        Self::build(name, processes, domains).map_err(Error::Model)
    }

    pub(crate) fn build(
        name: &str,
        processes: Vec<Process>,
        domains: Vec<Arc<Domain>>,
    ) -> std::result::Result<Self, Vec<ModelError>> {
        let mut errors = Vec::new();
        let chain_err = |position, message: String| ModelError {
            kind: DefectKind::BadChain,
            position,
            action: None,
            message,
        };
        if processes.is_empty() {
            return Err(vec![chain_err(0, "a program needs at least one process".into())]);
        }
        let n = processes.len();
        for (i, p) in processes.iter().enumerate() {
            if p.index != i + 1 {
                errors.push(chain_err(
                    p.index,
                    format!("process at list slot {} has chain index {}", i + 1, p.index),
                ));
            }
            if processes[..i].iter().any(|q| q.id == p.id) {
                errors.push(ModelError {
                    kind: DefectKind::DuplicateId,
                    position: p.index,
                    action: None,
                    message: format!("identifier {} is used by another process", p.id),
                });
            }
            for (k, v) in p.vars.iter().enumerate() {
                if p.vars[..k].iter().any(|w| w.name == v.name) {
                    errors.push(ModelError {
                        kind: DefectKind::DuplicateDecl,
                        position: p.index,
                        action: None,
                        message: format!("variable `{}` declared twice", v.name),
                    });
                }
            }
            for (k, a) in p.actions.iter().enumerate() {
                if p.actions[..k].iter().any(|b| b.name == a.name) {
                    errors.push(ModelError {
                        kind: DefectKind::DuplicateAction,
                        position: p.index,
                        action: Some(a.name.clone()),
                        message: format!("action `{}` defined twice", a.name),
                    });
                }
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }

        let mut slots = Vec::new();
        for p in &processes {
            for v in &p.vars {
                slots.push(Slot {
                    position: p.index,
                    name: v.name.clone(),
                    domain: v.domain.clone(),
                    kind: v.kind,
                });
            }
        }
        let schema = Schema::new(n, slots).map_err(|e| vec![chain_err(0, e.to_string())])?;

        let mut compiled = Vec::with_capacity(n);
        let mut action_ids = Vec::new();
        for p in &processes {
            let mut acts = Vec::with_capacity(p.actions.len());
            for (k, a) in p.actions.iter().enumerate() {
                let mut ck = Checker {
                    schema: &schema,
                    position: p.index,
                    action: &a.name,
                    errors: Vec::new(),
                };
                let guard = ck.boolean(&a.guard);
                let mut writes = Vec::new();
                let command = ck.stmts(&a.command, &mut writes);
                errors.append(&mut ck.errors);
                if let (Some(guard), Some(command)) = (guard, command) {
                    writes.sort_unstable();
                    writes.dedup();
                    acts.push(CompiledAction { guard, command, writes });
                }
                action_ids.push(ActionId {
                    position: p.index,
                    index: k,
                });
            }
            compiled.push(acts);
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(Self {
            name: name.to_string(),
            processes,
            domains,
            schema: Arc::new(schema),
            compiled: Arc::new(compiled),
            action_ids: Arc::new(action_ids),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.processes.len()
    }

    pub fn processes(&self) -> &[Process] {
        &self.processes
    }

    pub fn process(&self, position: usize) -> &Process {
        &self.processes[position - 1]
    }

    pub fn domains(&self) -> &[Arc<Domain>] {
        &self.domains
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn ids(&self) -> Vec<i64> {
        self.processes.iter().map(|p| p.id).collect()
    }

    /// All actions in canonical order (position major, declaration order minor).
    pub fn action_ids(&self) -> &[ActionId] {
        &self.action_ids
    }

    pub fn action(&self, id: ActionId) -> &Action {
        &self.processes[id.position - 1].actions[id.index]
    }

    pub fn action_label(&self, id: ActionId) -> String {
        format!("{}:{}", id.position, self.action(id).name)
    }

    /// Looks up an action by `position:name`.
    pub fn parse_action(&self, label: &str) -> Option<ActionId> {
        let (pos, name) = label.split_once(':')?;
        let position: usize = pos.trim().parse().ok()?;
        let p = self.processes.get(position.checked_sub(1)?)?;
        let index = p.actions.iter().position(|a| a.name == name.trim())?;
        Some(ActionId { position, index })
    }

    pub fn universe_size(&self) -> Option<u128> {
        self.schema.universe_size()
    }

    pub fn contains(&self, s: &ProgramState) -> bool {
        self.schema.contains(s.values())
    }

    pub fn state_from_index(&self, index: u64) -> ProgramState {
        ProgramState::from_values(self.schema.decode(index))
    }

    pub fn index_of(&self, s: &ProgramState) -> u64 {
        self.schema.encode(s.values())
    }

    pub fn parse_state(&self, text: &str) -> Result<ProgramState> {
        self.schema.parse(text).map(ProgramState::from_values)
    }

    pub fn render_state(&self, s: &ProgramState) -> String {
        self.schema.render(s.values())
    }

    pub fn is_enabled(&self, s: &ProgramState, a: ActionId) -> bool {
        self.compiled[a.position - 1][a.index].guard.eval(s.values()) != 0
    }

    /// Enabled actions in canonical order; empty iff `s` is terminal.
    pub fn enabled_actions(&self, s: &ProgramState) -> Vec<ActionId> {
        self.action_ids
            .iter()
            .copied()
            .filter(|&a| self.is_enabled(s, a))
            .collect()
    }

    /// Executes an enabled action atomically.
    pub fn apply(&self, s: &ProgramState, a: ActionId) -> Result<ProgramState> {
        if !self.contains(s) {
            return Err(Error::InvalidState("state is outside the program universe".into()));
        }
        if a.position == 0 || a.position > self.n() || a.index >= self.processes[a.position - 1].actions.len() {
            return Err(Error::Contract(format!("no action {}:{}", a.position, a.index)));
        }
        if !self.is_enabled(s, a) {
            return Err(Error::Contract(format!(
                "action {} is not enabled in {}",
                self.action_label(a),
                self.render_state(s)
            )));
        }
        Ok(self.apply_unchecked(s, a))
    }

    pub(crate) fn apply_unchecked(&self, s: &ProgramState, a: ActionId) -> ProgramState {
        let mut v = s.values().to_vec();
        exec(&self.compiled[a.position - 1][a.index].command, &mut v);
        ProgramState::from_values(v)
    }

    /// Slots the action's command can assign.
    pub fn writes(&self, a: ActionId) -> &[usize] {
        &self.compiled[a.position - 1][a.index].writes
    }

    /// Successor states paired with the action producing them, in canonical action order.
    pub fn successors(&self, s: &ProgramState) -> Vec<(ActionId, ProgramState)> {
        self.action_ids
            .iter()
            .filter(|&&a| self.is_enabled(s, a))
            .map(|&a| (a, self.apply_unchecked(s, a)))
            .collect()
    }

    /// Restriction of `s` to the process's own variables and its neighbors'.
    pub fn extended_state(&self, s: &ProgramState, position: usize) -> ExtendedState {
        let range = self.schema.window(position);
        ExtendedState {
            slots: range.clone().collect(),
            values: s.values()[range].to_vec(),
        }
    }
}

/// A partial assignment over a contiguous window of schema slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedState {
    pub slots: Vec<usize>,
    pub values: Vec<Value>,
}
