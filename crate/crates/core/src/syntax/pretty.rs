//! Printing flat specifications back to source.

use std::fmt::Write as _;

use crate::kernel::{FlatSpec, FuncDecl, ProcessDef};

fn func_line(f: &FuncDecl) -> String {
    let name = if f.name == crate::kernel::term::CONNECT {
        "_ >> _".to_string()
    } else {
        f.name.clone()
    };
    if f.args.is_empty() {
        format!("{name} : -> {}", f.result)
    } else {
        format!("{name} : {} -> {}", f.args.join(" # "), f.result)
    }
}

fn signature(name: &str, sorts: &[String]) -> String {
    if sorts.is_empty() {
        name.to_string()
    } else {
        format!("{name} : {}", sorts.join(" # "))
    }
}

fn indent(text: &str, by: usize) -> String {
    let pad = " ".repeat(by);
    text.lines()
        .map(|l| {
            if l.is_empty() {
                "\n".to_string()
            } else {
                format!("{pad}{l}\n")
            }
        })
        .collect()
}

/// A definition in the conventional one-operand-per-line layout.
pub fn print_def(d: &ProcessDef) -> String {
    d.layout()
}

fn fresh(base: &str, taken: &dyn Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !taken(n))
        .unwrap()
}

/// Prints `fs` as one data module and one process module. Flattening the
/// output with the returned root module name gives back `fs`.
pub fn print_flat_spec(fs: &FlatSpec) -> (String, String) {
    let taken = |n: &str| fs.process_defs.contains_key(n);
    let root = match &fs.entry {
        Some(e) => e.clone(),
        None => fresh("Spec", &taken),
    };
    let data_name = fresh(&format!("{root}Data"), &|n: &str| n == root);
    let mut out = String::new();

    let _ = writeln!(out, "data module {data_name}\nbegin\n  exports\n  begin");
    if !fs.sorts.is_empty() {
        let _ = writeln!(out, "    sorts\n      {}", fs.sorts.join(", "));
    }
    if !fs.functions.is_empty() {
        out.push_str("    functions\n");
        for f in fs.functions.values() {
            let _ = writeln!(out, "      {}", func_line(f));
        }
    }
    out.push_str("  end\n");
    if !fs.variables.is_empty() {
        out.push_str("  variables\n");
        for (v, s) in &fs.variables {
            let _ = writeln!(out, "    {v} : -> {s}");
        }
    }
    if !fs.equations.is_empty() {
        out.push_str("  equations\n");
        for e in &fs.equations {
            let _ = writeln!(out, "    {e}");
        }
    }
    let _ = writeln!(out, "end {data_name}\n");

    let _ = writeln!(out, "process module {root}\nbegin");
    if let Some(e) = &fs.entry {
        let _ = writeln!(
            out,
            "  exports\n  begin\n    processes\n      {}\n  end",
            signature(e, &sorts_of(fs, e))
        );
    }
    let _ = writeln!(out, "  imports\n    {data_name}");
    if !fs.atoms.is_empty() {
        out.push_str("  atoms\n");
        for (a, sorts) in &fs.atoms {
            let _ = writeln!(out, "    {}", signature(a, sorts));
        }
    }
    let others: Vec<&ProcessDef> = fs
        .process_defs
        .values()
        .filter(|d| Some(&d.name) != fs.entry.as_ref())
        .collect();
    if !others.is_empty() {
        out.push_str("  processes\n");
        for d in &others {
            let sorts: Vec<String> = d.params.iter().map(|(_, s)| s.clone()).collect();
            let _ = writeln!(out, "    {}", signature(&d.name, &sorts));
        }
    }
    if !fs.sets.is_empty() {
        out.push_str("  sets\n    of atoms\n");
        for (n, s) in &fs.sets {
            let _ = writeln!(out, "      {n} = {s}");
        }
    }
    if !fs.comms.is_empty() {
        out.push_str("  communications\n");
        for c in &fs.comms.entries {
            let _ = writeln!(out, "    {c}");
        }
    }
    if !fs.disrupts.is_empty() {
        let _ = writeln!(out, "  disrupts\n    {}", fs.disrupts.join(", "));
    }
    if !fs.process_defs.is_empty() {
        out.push_str("  definitions\n");
        for d in fs.process_defs.values() {
            out.push_str(&indent(&print_def(d), 4));
        }
    }
    let _ = writeln!(out, "end {root}");
    (out, root)
}

fn sorts_of(fs: &FlatSpec, name: &str) -> Vec<String> {
    fs.process_defs
        .get(name)
        .map(|d| d.params.iter().map(|(_, s)| s.clone()).collect())
        .unwrap_or_default()
}

/// A process module exporting and defining `defs`.
pub fn print_process_module(name: &str, imports: &[String], defs: &[ProcessDef]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "process module {name}\nbegin");
    if !defs.is_empty() {
        out.push_str("  exports\n  begin\n    processes\n");
        for d in defs {
            let sorts: Vec<String> = d.params.iter().map(|(_, s)| s.clone()).collect();
            let _ = writeln!(out, "      {}", signature(&d.name, &sorts));
        }
        out.push_str("  end\n");
    }
    if !imports.is_empty() {
        let _ = writeln!(out, "  imports\n    {}", imports.join(",\n    "));
    }
    if !defs.is_empty() {
        out.push_str("  definitions\n");
        for d in defs {
            out.push_str(&indent(&print_def(d), 4));
        }
    }
    let _ = writeln!(out, "end {name}");
    out
}
