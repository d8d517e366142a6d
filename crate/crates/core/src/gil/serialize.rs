use std::collections::HashMap;

use super::{FeatureStructure, Value};

/// Emits the concrete syntax. Nodes reachable more than once are written in
/// full at their first occurrence with a `#n=` tag and as `#n` afterwards.
pub fn serialize_gil(fs: &FeatureStructure) -> String {
    let mut seen: HashMap<usize, usize> = HashMap::new();
    count(fs, &mut seen);
    let mut w = Writer {
        uses: seen,
        tags: HashMap::new(),
        next_tag: 1,
        out: String::new(),
    };
    w.fs(fs);
    w.out
}

fn count(fs: &FeatureStructure, seen: &mut HashMap<usize, usize>) {
    let n = seen.entry(fs.node_addr()).or_insert(0);
    *n += 1;
    if *n > 1 {
        return;
    }
    for (_, v) in fs.pairs() {
        count_value(v, seen);
    }
}

fn count_value(v: &Value, seen: &mut HashMap<usize, usize>) {
    match v {
        Value::Atom(_) => {}
        Value::List(items) => items.iter().for_each(|i| count_value(i, seen)),
        Value::Fs(fs) => count(fs, seen),
    }
}

struct Writer {
    uses: HashMap<usize, usize>,
    tags: HashMap<usize, u32>,
    next_tag: u32,
    out: String,
}

impl Writer {
    fn fs(&mut self, fs: &FeatureStructure) {
        let addr = fs.node_addr();
        if let Some(tag) = self.tags.get(&addr) {
            self.out.push_str(&format!("#{tag}"));
            return;
        }
        if self.uses.get(&addr).copied().unwrap_or(0) > 1 {
            let tag = self.next_tag;
            self.next_tag += 1;
            self.tags.insert(addr, tag);
            self.out.push_str(&format!("#{tag}= "));
        }
        self.out.push('[');
        for (i, (k, v)) in fs.pairs().iter().enumerate() {
            if i > 0 {
                self.out.push(' ');
            }
            self.out.push('(');
            self.out.push_str(k.as_str());
            self.out.push(' ');
            self.value(v);
            self.out.push(')');
        }
        self.out.push(']');
    }

    fn value(&mut self, v: &Value) {
        match v {
            Value::Atom(a) => self.out.push_str(&a.to_string()),
            Value::Fs(fs) => self.fs(fs),
            Value::List(items) => {
                self.out.push('<');
                for (i, it) in items.iter().enumerate() {
                    self.out.push_str(if i == 0 { " " } else { ", " });
                    self.value(it);
                }
                self.out.push_str(" >");
            }
        }
    }
}
