//! Name-keyed factories for interchangeable strategies (cocycles, length
//! functions, abscissa estimators), selected at runtime from spec strings.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A parsed spec string such as `"clifford n=3"` or `"table cocycle.txt"`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpecArgs {
    pub kind: String,
    pub positional: Vec<String>,
    pub named: BTreeMap<String, String>,
}

impl SpecArgs {
    pub fn parse(spec: &str) -> Result<Self> {
        let mut tokens = spec.split_whitespace();
        let kind = tokens.next().ok_or_else(|| Error::InvalidSpec("empty spec".into()))?.to_string();
        let mut out = SpecArgs { kind, ..Default::default() };
        for t in tokens {
            match t.split_once('=') {
                Some((k, v)) => {
                    out.named.insert(k.to_string(), v.to_string());
                }
                None => out.positional.push(t.to_string()),
            }
        }
        Ok(out)
    }

    /// Named value under any of `keys`, else the `pos`-th positional token.
    pub fn value(&self, keys: &[&str], pos: usize) -> Option<&str> {
        keys.iter()
            .find_map(|k| self.named.get(*k))
            .map(String::as_str)
            .or_else(|| self.positional.get(pos).map(String::as_str))
    }

    pub fn parsed<T: std::str::FromStr>(&self, keys: &[&str], pos: usize) -> Result<T> {
        let v = self
            .value(keys, pos)
            .ok_or_else(|| Error::InvalidSpec(format!("{}: missing parameter {}", self.kind, keys[0])))?;
        v.parse()
            .map_err(|_| Error::InvalidSpec(format!("{}: cannot parse {} = {v:?}", self.kind, keys[0])))
    }
}

pub type Factory<T, C> = Arc<dyn Fn(&SpecArgs, &C) -> Result<Arc<T>> + Send + Sync>;

pub struct Registry<T: ?Sized, C> {
    entries: BTreeMap<String, Factory<T, C>>,
}

impl<T: ?Sized, C> Default for Registry<T, C> {
    fn default() -> Self {
        Registry { entries: BTreeMap::new() }
    }
}

impl<T: ?Sized, C> Registry<T, C> {
    pub fn register(
        &mut self,
        name: &str,
        f: impl Fn(&SpecArgs, &C) -> Result<Arc<T>> + Send + Sync + 'static,
    ) {
        self.entries.insert(name.to_string(), Arc::new(f));
    }

    pub fn build(&self, spec: &str, ctx: &C) -> Result<Arc<T>> {
        let args = SpecArgs::parse(spec)?;
        let f = self
            .entries
            .get(&args.kind)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown kind {:?}; known: {:?}", args.kind, self.names())))?;
        f(&args, ctx)
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let a = SpecArgs::parse("theta θ=0.25").unwrap();
        assert_eq!(a.kind, "theta");
        assert_eq!(a.parsed::<f64>(&["θ", "theta"], 0).unwrap(), 0.25);
        let b = SpecArgs::parse("clifford 3").unwrap();
        assert_eq!(b.parsed::<usize>(&["n"], 0).unwrap(), 3);
        assert!(SpecArgs::parse("  ").is_err());
    }

    #[test]
    fn unknown_kind_lists_names() {
        let mut r: Registry<str, ()> = Registry::default();
        r.register("a", |_, _| Ok(Arc::from("x")));
        assert!(r.build("b", &()).is_err());
        assert_eq!(&*r.build("a", &()).unwrap(), "x");
    }
}
