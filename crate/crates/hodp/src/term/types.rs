use std::fmt;
use std::sync::Arc;

/// Interned-ish identifier shared between terms.
pub type Name = Arc<str>;

/// A simple type: either a sort or an arrow.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Type {
    Sort(Name),
    Arrow(Arc<Type>, Arc<Type>),
}

impl Type {
    pub fn sort(name: &str) -> Type {
        Type::Sort(Name::from(name))
    }

    pub fn arrow(domain: Type, codomain: Type) -> Type {
        Type::Arrow(Arc::new(domain), Arc::new(codomain))
    }

    /// Builds `args[0] -> ... -> args[n-1] -> out`.
    pub fn arrows<I>(args: I, out: Type) -> Type
    where
        I: IntoIterator<Item = Type>,
        I::IntoIter: DoubleEndedIterator,
    {
        args.into_iter()
            .rev()
            .fold(out, |acc, a| Type::arrow(a, acc))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Type::Sort(_))
    }

    pub fn domain(&self) -> Option<&Type> {
        match self {
            Type::Arrow(d, _) => Some(d),
            Type::Sort(_) => None,
        }
    }

    pub fn codomain(&self) -> Option<&Type> {
        match self {
            Type::Arrow(_, c) => Some(c),
            Type::Sort(_) => None,
        }
    }

    /// The flattened form `σ1 → … → σm → ι`: argument types and output sort.
    pub fn flatten(&self) -> (Vec<&Type>, &Name) {
        let mut args = Vec::new();
        let mut t = self;
        loop {
            match t {
                Type::Arrow(d, c) => {
                    args.push(d.as_ref());
                    t = c;
                }
                Type::Sort(s) => return (args, s),
            }
        }
    }

    /// Number of arrows in the flattened form.
    pub fn arity(&self) -> usize {
        match self {
            Type::Arrow(_, c) => 1 + c.arity(),
            Type::Sort(_) => 0,
        }
    }

    pub fn output_sort(&self) -> &Name {
        self.flatten().1
    }

    /// The type left after supplying `n` arguments.
    pub fn after_args(&self, n: usize) -> Option<&Type> {
        let mut t = self;
        for _ in 0..n {
            t = t.codomain()?;
        }
        Some(t)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Sort(s) => write!(f, "{s}"),
            Type::Arrow(d, c) => {
                if d.is_base() {
                    write!(f, "{d} -> {c}")
                } else {
                    write!(f, "({d}) -> {c}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_and_print() {
        let nat = Type::sort("nat");
        let list = Type::sort("list");
        let map = Type::arrows(
            [Type::arrow(nat.clone(), nat.clone()), list.clone()],
            list.clone(),
        );
        let (args, out) = map.flatten();
        assert_eq!(args.len(), 2);
        assert_eq!(&**out, "list");
        assert_eq!(map.arity(), 2);
        assert_eq!(map.to_string(), "(nat -> nat) -> list -> list");
        assert_eq!(map.after_args(1), Some(&Type::arrow(list.clone(), list)));
    }
}
