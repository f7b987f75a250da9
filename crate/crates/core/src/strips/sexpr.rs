use std::fmt;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }
}

/// Reads every top-level expression. Symbols are lower-cased; `;` starts a
/// comment running to the end of the line.
pub fn read_all(text: &str) -> Result<Vec<SExpr>, (String, Pos)> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);
    while let Some(&c) = chars.peek() {
        let here = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
                continue;
            }
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                stack.push((Vec::new(), here));
            }
            ')' => {
                chars.next();
                let (items, start) = stack.pop().ok_or(("unexpected ')'".to_string(), here))?;
                let e = SExpr::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(e),
                    None => top.push(e),
                }
            }
            _ => {
                let mut sym = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    sym.extend(c.to_lowercase());
                    chars.next();
                    col += 1;
                }
                let e = SExpr::Atom(sym, here);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(e),
                    None => top.push(e),
                }
                continue;
            }
        }
        col += 1;
    }
    if let Some((_, start)) = stack.pop() {
        return Err(("unclosed '('".to_string(), start));
    }
    Ok(top)
}
