use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::sexpr::{read_all, Pos, SExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Domain,
    Problem,
    Plan,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Domain => "domain",
            Source::Problem => "problem",
            Source::Plan => "plan",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unsupported requirement {0}")]
    UnsupportedRequirement(String),
    #[error("unsupported construct {0}")]
    Unsupported(String),
    #[error("predicate {predicate} expects {expected} arguments, got {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("unknown type {0}")]
    UnknownType(String),
    #[error("unknown parameter {0}")]
    UnknownParameter(String),
    #[error("unknown action {0}")]
    UnknownAction(String),
    #[error("{what} {name} declared twice")]
    Duplicate { what: &'static str, name: String },
    #[error("{object} of type {found} used where {expected} is required")]
    TypeMismatch {
        object: String,
        expected: String,
        found: String,
    },
    #[error("problem is for domain {found}, not {expected}")]
    DomainMismatch { expected: String, found: String },
}

/// A diagnostic with the file it came from and a 1-based position.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{file}:{pos}: {kind}")]
pub struct ParseError {
    pub file: Source,
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub params: Vec<TypedName>,
}

/// A positive literal; arguments are object names or `?variables`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub precondition: Vec<Atom>,
    pub add: Vec<Atom>,
    pub delete: Vec<Atom>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<String>,
    /// Declared type to parent type; `object` is the implicit root.
    pub types: BTreeMap<String, String>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<Predicate>,
    pub actions: Vec<ActionSchema>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<Atom>,
    pub goal: Vec<Atom>,
}

const SUPPORTED: [&str; 2] = [":strips", ":typing"];

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&Predicate> {
        self.predicates.iter().find(|p| p.name == name)
    }

    /// True if `ty` equals `ancestor` or inherits from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        let mut cur = ty;
        for _ in 0..=self.types.len() + 1 {
            if cur == ancestor {
                return true;
            }
            match self.types.get(cur) {
                Some(parent) => cur = parent,
                None => return false,
            }
        }
        false
    }

    fn has_type(&self, ty: &str) -> bool {
        ty == "object" || self.types.contains_key(ty)
    }
}

/// Parses a domain and a problem in the STRIPS/typing subset and checks
/// every name, arity and type against the declarations.
pub fn parse(domain_text: &str, problem_text: &str) -> Result<(Domain, Problem), ParseError> {
    let domain = parse_domain(domain_text)?;
    let problem = parse_problem(&domain, problem_text)?;
    Ok((domain, problem))
}

struct Ctx {
    source: Source,
}

impl Ctx {
    fn err<T>(&self, pos: Pos, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            file: self.source,
            pos,
            kind,
        })
    }

    fn syntax<T>(&self, pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
        self.err(pos, ParseErrorKind::Syntax(msg.into()))
    }

    fn list<'a>(&self, e: &'a SExpr, what: &str) -> Result<&'a [SExpr], ParseError> {
        match e.list() {
            Some(l) => Ok(l),
            None => self.syntax(e.pos(), format!("expected a list for {what}")),
        }
    }

    fn atom<'a>(&self, e: &'a SExpr, what: &str) -> Result<&'a str, ParseError> {
        match e.atom() {
            Some(a) => Ok(a),
            None => self.syntax(e.pos(), format!("expected {what}")),
        }
    }

    fn read_define<'a>(&self, top: &'a [SExpr], kind: &str) -> Result<(&'a [SExpr], String), ParseError> {
        let [def] = top else {
            let pos = top.get(1).map_or(Pos { line: 1, col: 1 }, SExpr::pos);
            return self.syntax(pos, "expected exactly one (define ...) form");
        };
        let items = self.list(def, "define")?;
        if items.first().and_then(SExpr::atom) != Some("define") {
            return self.syntax(def.pos(), "expected (define ...)");
        }
        let header = match items.get(1) {
            Some(h) => self.list(h, kind)?,
            None => return self.syntax(def.pos(), format!("missing ({kind} name)")),
        };
        match header {
            [k, name] if k.atom() == Some(kind) => Ok((&items[2..], self.atom(name, "a name")?.to_string())),
            _ => self.syntax(items[1].pos(), format!("expected ({kind} name)")),
        }
    }

    fn typed_list(&self, items: &[SExpr], variables: bool) -> Result<Vec<TypedName>, ParseError> {
        let mut out = Vec::new();
        let mut pending: Vec<(String, Pos)> = Vec::new();
        let mut i = 0;
        while i < items.len() {
            let a = self.atom(&items[i], "a name")?;
            if a == "-" {
                let ty = match items.get(i + 1) {
                    Some(SExpr::Atom(t, _)) => t.clone(),
                    Some(SExpr::List(_, p)) => {
                        return self.err(*p, ParseErrorKind::Unsupported("(either ...)".into()))
                    }
                    None => return self.syntax(items[i].pos(), "missing type after '-'"),
                };
                if pending.is_empty() {
                    return self.syntax(items[i].pos(), "type without names");
                }
                for (name, pos) in pending.drain(..) {
                    out.push(TypedName {
                        name,
                        ty: ty.clone(),
                        pos,
                    });
                }
                i += 2;
                continue;
            }
            if variables != a.starts_with('?') {
                let what = if variables { "a ?variable" } else { "a name" };
                return self.syntax(items[i].pos(), format!("expected {what}, got {a}"));
            }
            pending.push((a.to_string(), items[i].pos()));
            i += 1;
        }
        for (name, pos) in pending {
            out.push(TypedName {
                name,
                ty: "object".into(),
                pos,
            });
        }
        Ok(out)
    }

    fn literal(&self, e: &SExpr) -> Result<(bool, Atom), ParseError> {
        let items = self.list(e, "a literal")?;
        let Some(head) = items.first() else {
            return self.syntax(e.pos(), "empty literal");
        };
        let head = self.atom(head, "a predicate name")?;
        match head {
            "not" => match &items[1..] {
                [inner] => {
                    let (positive, atom) = self.literal(inner)?;
                    if !positive {
                        return self.syntax(inner.pos(), "double negation");
                    }
                    Ok((false, atom))
                }
                _ => self.syntax(e.pos(), "(not ...) takes one literal"),
            },
            "and" | "or" | "imply" | "forall" | "exists" | "when" | "=" => {
                self.err(e.pos(), ParseErrorKind::Unsupported(format!("({head} ...)")))
            }
            _ => {
                let args = items[1..]
                    .iter()
                    .map(|a| self.atom(a, "an argument").map(str::to_string))
                    .collect::<Result<_, _>>()?;
                Ok((
                    true,
                    Atom {
                        predicate: head.to_string(),
                        args,
                        pos: e.pos(),
                    },
                ))
            }
        }
    }

    /// A conjunction `(and l1 l2 ...)`, a single literal, or `()`.
    fn conjunction(&self, e: &SExpr) -> Result<Vec<(bool, Atom)>, ParseError> {
        let items = self.list(e, "a formula")?;
        match items.first().and_then(SExpr::atom) {
            None if items.is_empty() => Ok(Vec::new()),
            Some("and") => items[1..].iter().map(|l| self.literal(l)).collect(),
            _ => Ok(vec![self.literal(e)?]),
        }
    }

    fn positive(&self, lits: Vec<(bool, Atom)>, what: &str) -> Result<Vec<Atom>, ParseError> {
        lits.into_iter()
            .map(|(pos, a)| {
                if pos {
                    Ok(a)
                } else {
                    self.err(a.pos, ParseErrorKind::Unsupported(format!("negative {what}")))
                }
            })
            .collect()
    }

    fn requirements(&self, items: &[SExpr]) -> Result<Vec<String>, ParseError> {
        let mut out = Vec::new();
        for r in items {
            let name = self.atom(r, "a requirement")?;
            if !SUPPORTED.contains(&name) {
                return self.err(r.pos(), ParseErrorKind::UnsupportedRequirement(name.to_string()));
            }
            out.push(name.to_string());
        }
        Ok(out)
    }

    fn check_atom(
        &self,
        domain: &Domain,
        atom: &Atom,
        types: &HashMap<&str, &str>,
    ) -> Result<(), ParseError> {
        let Some(pred) = domain.predicate(&atom.predicate) else {
            return self.err(atom.pos, ParseErrorKind::UnknownPredicate(atom.predicate.clone()));
        };
        if pred.params.len() != atom.args.len() {
            return self.err(
                atom.pos,
                ParseErrorKind::ArityMismatch {
                    predicate: atom.predicate.clone(),
                    expected: pred.params.len(),
                    found: atom.args.len(),
                },
            );
        }
        for (arg, param) in atom.args.iter().zip(&pred.params) {
            let Some(ty) = types.get(arg.as_str()) else {
                let kind = if arg.starts_with('?') {
                    ParseErrorKind::UnknownParameter(arg.clone())
                } else {
                    ParseErrorKind::UnknownObject(arg.clone())
                };
                return self.err(atom.pos, kind);
            };
            // Schema variables may be declared with a supertype; grounding
            // drops the ill-typed bindings.
            let compatible = domain.is_subtype(ty, &param.ty)
                || (arg.starts_with('?') && domain.is_subtype(&param.ty, ty));
            if !compatible {
                return self.err(
                    atom.pos,
                    ParseErrorKind::TypeMismatch {
                        object: arg.clone(),
                        expected: param.ty.clone(),
                        found: ty.to_string(),
                    },
                );
            }
        }
        Ok(())
    }

    fn check_types(&self, domain: &Domain, names: &[TypedName]) -> Result<(), ParseError> {
        for n in names {
            if !domain.has_type(&n.ty) {
                return self.err(n.pos, ParseErrorKind::UnknownType(n.ty.clone()));
            }
        }
        Ok(())
    }
}

fn section<'a>(ctx: &Ctx, e: &'a SExpr) -> Result<(&'a str, &'a [SExpr]), ParseError> {
    let items = ctx.list(e, "a section")?;
    match items.first() {
        Some(SExpr::Atom(k, _)) if k.starts_with(':') => Ok((k, &items[1..])),
        _ => ctx.syntax(e.pos(), "expected a (:section ...)"),
    }
}

fn parse_domain(text: &str) -> Result<Domain, ParseError> {
    let ctx = Ctx {
        source: Source::Domain,
    };
    let top = read_all(text).or_else(|(m, p)| ctx.syntax(p, m))?;
    let (sections, name) = ctx.read_define(&top, "domain")?;
    let mut domain = Domain {
        name,
        requirements: Vec::new(),
        types: BTreeMap::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };
    let mut schemas = Vec::new();
    for s in sections {
        let (key, body) = section(&ctx, s)?;
        match key {
            ":requirements" => domain.requirements = ctx.requirements(body)?,
            ":types" => {
                for t in ctx.typed_list(body, false)? {
                    if t.name == "object" {
                        continue;
                    }
                    if domain.types.insert(t.name.clone(), t.ty.clone()).is_some() {
                        return ctx.err(
                            t.pos,
                            ParseErrorKind::Duplicate {
                                what: "type",
                                name: t.name,
                            },
                        );
                    }
                }
                // Parents named only after '-' are implicitly declared.
                let parents: Vec<String> = domain.types.values().cloned().collect();
                for p in parents {
                    if p != "object" {
                        domain.types.entry(p).or_insert_with(|| "object".into());
                    }
                }
            }
            ":constants" => domain.constants = ctx.typed_list(body, false)?,
            ":predicates" => {
                for p in body {
                    let items = ctx.list(p, "a predicate")?;
                    let Some(head) = items.first() else {
                        return ctx.syntax(p.pos(), "empty predicate");
                    };
                    let name = ctx.atom(head, "a predicate name")?.to_string();
                    if domain.predicate(&name).is_some() {
                        return ctx.err(
                            p.pos(),
                            ParseErrorKind::Duplicate {
                                what: "predicate",
                                name,
                            },
                        );
                    }
                    let params = ctx.typed_list(&items[1..], true)?;
                    domain.predicates.push(Predicate { name, params });
                }
            }
            ":action" => schemas.push(s),
            other => {
                return ctx.err(s.pos(), ParseErrorKind::Unsupported(other.to_string()));
            }
        }
    }
    for p in &domain.predicates {
        ctx.check_types(&domain, &p.params)?;
    }
    ctx.check_types(&domain, &domain.constants)?;
    for s in schemas {
        let a = parse_action(&ctx, &domain, s)?;
        if domain.actions.iter().any(|b| b.name == a.name) {
            return ctx.err(
                a.pos,
                ParseErrorKind::Duplicate {
                    what: "action",
                    name: a.name,
                },
            );
        }
        domain.actions.push(a);
    }
    Ok(domain)
}

fn parse_action(ctx: &Ctx, domain: &Domain, e: &SExpr) -> Result<ActionSchema, ParseError> {
    let items = ctx.list(e, "an action")?;
    let name = match items.get(1) {
        Some(n) => ctx.atom(n, "an action name")?.to_string(),
        None => return ctx.syntax(e.pos(), "missing action name"),
    };
    let mut action = ActionSchema {
        name,
        params: Vec::new(),
        precondition: Vec::new(),
        add: Vec::new(),
        delete: Vec::new(),
        pos: e.pos(),
    };
    let mut i = 2;
    while i < items.len() {
        let key = ctx.atom(&items[i], "an action keyword")?;
        let Some(value) = items.get(i + 1) else {
            return ctx.syntax(items[i].pos(), format!("missing value for {key}"));
        };
        match key {
            ":parameters" => action.params = ctx.typed_list(ctx.list(value, "parameters")?, true)?,
            ":precondition" => {
                action.precondition = ctx.positive(ctx.conjunction(value)?, "precondition")?
            }
            ":effect" => {
                for (positive, atom) in ctx.conjunction(value)? {
                    if positive {
                        action.add.push(atom);
                    } else {
                        action.delete.push(atom);
                    }
                }
            }
            other => return ctx.err(items[i].pos(), ParseErrorKind::Unsupported(other.to_string())),
        }
        i += 2;
    }
    ctx.check_types(domain, &action.params)?;
    let mut scope: HashMap<&str, &str> = domain
        .constants
        .iter()
        .map(|c| (c.name.as_str(), c.ty.as_str()))
        .collect();
    let mut seen = HashSet::new();
    for p in &action.params {
        if !seen.insert(p.name.as_str()) {
            return ctx.err(
                p.pos,
                ParseErrorKind::Duplicate {
                    what: "parameter",
                    name: p.name.clone(),
                },
            );
        }
        scope.insert(&p.name, &p.ty);
    }
    for atom in action
        .precondition
        .iter()
        .chain(&action.add)
        .chain(&action.delete)
    {
        ctx.check_atom(domain, atom, &scope)?;
    }
    Ok(action)
}

fn parse_problem(domain: &Domain, text: &str) -> Result<Problem, ParseError> {
    let ctx = Ctx {
        source: Source::Problem,
    };
    let top = read_all(text).or_else(|(m, p)| ctx.syntax(p, m))?;
    let (sections, name) = ctx.read_define(&top, "problem")?;
    let mut problem = Problem {
        name,
        domain: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
    };
    let mut goal_seen = false;
    for s in sections {
        let (key, body) = section(&ctx, s)?;
        match key {
            ":domain" => {
                let [d] = body else {
                    return ctx.syntax(s.pos(), "expected (:domain name)");
                };
                let d = ctx.atom(d, "a domain name")?;
                if d != domain.name {
                    return ctx.err(
                        s.pos(),
                        ParseErrorKind::DomainMismatch {
                            expected: domain.name.clone(),
                            found: d.to_string(),
                        },
                    );
                }
                problem.domain = d.to_string();
            }
            ":requirements" => {
                ctx.requirements(body)?;
            }
            ":objects" => problem.objects = ctx.typed_list(body, false)?,
            ":init" => {
                for l in body {
                    let (positive, atom) = ctx.literal(l)?;
                    if !positive {
                        return ctx.err(atom.pos, ParseErrorKind::Unsupported("negative initial fact".into()));
                    }
                    problem.init.push(atom);
                }
            }
            ":goal" => {
                let [g] = body else {
                    return ctx.syntax(s.pos(), "expected (:goal formula)");
                };
                problem.goal = ctx.positive(ctx.conjunction(g)?, "goal")?;
                goal_seen = true;
            }
            other => return ctx.err(s.pos(), ParseErrorKind::Unsupported(other.to_string())),
        }
    }
    if !goal_seen {
        return ctx.syntax(top[0].pos(), "missing (:goal ...)");
    }
    ctx.check_types(domain, &problem.objects)?;
    let mut scope: HashMap<&str, &str> = HashMap::new();
    for o in domain.constants.iter().chain(&problem.objects) {
        if scope.insert(&o.name, &o.ty).is_some() {
            return ctx.err(
                o.pos,
                ParseErrorKind::Duplicate {
                    what: "object",
                    name: o.name.clone(),
                },
            );
        }
    }
    for atom in problem.init.iter().chain(&problem.goal) {
        if let Some(v) = atom.args.iter().find(|a| a.starts_with('?')) {
            return ctx.err(atom.pos, ParseErrorKind::UnknownObject(v.clone()));
        }
        ctx.check_atom(domain, atom, &scope)?;
    }
    Ok(problem)
}
