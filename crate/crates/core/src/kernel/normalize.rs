//! Canonical forms for process terms.

use super::expr::ProcessExpr;

/// Structural normal form:
///
/// * nested `+`, `||` and `.` are flattened;
/// * operands of `+` and `||` are sorted, duplicate summands dropped;
/// * `x + delta = x`, `delta . x = delta`;
/// * operators over empty action sets or renamings are dropped.
///
/// The result is a fixed point: `normalize(normalize(e)) == normalize(e)`.
pub fn normalize(e: &ProcessExpr) -> ProcessExpr {
    use ProcessExpr::*;
    match e {
        Atom(..) | Call(..) | Skip | Delta => e.clone(),
        Seq(xs) => {
            let mut items = Vec::with_capacity(xs.len());
            for x in xs {
                match normalize(x) {
                    Seq(inner) => items.extend(inner),
                    other => items.push(other),
                }
            }
            if let Some(pos) = items.iter().position(|x| *x == Delta) {
                items.truncate(pos + 1);
            }
            match items.len() {
                0 => Skip,
                _ => ProcessExpr::seq(items),
            }
        }
        Alt(xs) => {
            let mut items = Vec::with_capacity(xs.len());
            for x in xs {
                match normalize(x) {
                    Alt(inner) => items.extend(inner),
                    Delta => {}
                    other => items.push(other),
                }
            }
            items.sort();
            items.dedup();
            ProcessExpr::alt(items)
        }
        Par(xs) => {
            let mut items = Vec::with_capacity(xs.len());
            for x in xs {
                match normalize(x) {
                    Par(inner) => items.extend(inner),
                    other => items.push(other),
                }
            }
            items.sort();
            match items.len() {
                0 => Skip,
                _ => ProcessExpr::par(items),
            }
        }
        Encaps(h, b) if h.is_empty() => normalize(b),
        Hide(h, b) if h.is_empty() => normalize(b),
        Rename(r, b) if r.is_empty() => normalize(b),
        Encaps(h, b) => Encaps(h.clone(), Box::new(normalize(b))),
        Hide(h, b) => Hide(h.clone(), Box::new(normalize(b))),
        Rename(r, b) => Rename(r.clone(), Box::new(normalize(b))),
        Sum(v, s, b) => Sum(v.clone(), s.clone(), Box::new(normalize(b))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ProcessExpr::*;

    fn a(n: &str) -> ProcessExpr {
        ProcessExpr::atom(n)
    }

    #[test]
    fn orders_alternatives() {
        assert_eq!(
            normalize(&Alt(vec![a("b"), a("a")])),
            Alt(vec![a("a"), a("b")])
        );
    }

    #[test]
    fn drops_deadlock_summand() {
        assert_eq!(normalize(&Alt(vec![a("x"), Delta])), a("x"));
        assert_eq!(normalize(&Alt(vec![Delta, Delta])), Delta);
    }

    #[test]
    fn flattens_sequences() {
        let e = Seq(vec![Seq(vec![a("a"), a("b")]), a("c")]);
        assert_eq!(normalize(&e), Seq(vec![a("a"), a("b"), a("c")]));
        assert_eq!(
            normalize(&Seq(vec![a("a"), Delta, a("b")])),
            Seq(vec![a("a"), Delta])
        );
    }

    #[test]
    fn nested_alternatives_collapse() {
        let e = Alt(vec![a("c"), Alt(vec![a("b"), Alt(vec![a("a"), a("c")])])]);
        assert_eq!(normalize(&e), Alt(vec![a("a"), a("b"), a("c")]));
    }
}
