//! Module-level syntax tree, before import resolution.

use crate::kernel::{ActPattern, CommEntry, FuncDecl, ProcessExpr, Term};

/// Source position. Positions never take part in equality so that trees
/// parsed from differently laid out sources compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleKind {
    Data,
    Process,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModuleSet {
    pub modules: Vec<Module>,
}

impl ModuleSet {
    pub fn data_modules(&self) -> impl Iterator<Item = &Module> {
        self.modules.iter().filter(|m| m.kind == ModuleKind::Data)
    }

    pub fn process_modules(&self) -> impl Iterator<Item = &Module> {
        self.modules
            .iter()
            .filter(|m| m.kind == ModuleKind::Process)
    }

    pub fn get(&self, name: &str) -> Option<&Module> {
        self.modules.iter().find(|m| m.name == name)
    }

    pub fn extend(&mut self, other: ModuleSet) {
        self.modules.extend(other.modules);
    }

    /// Every import with the module that contains it.
    pub fn import_bindings(&self) -> impl Iterator<Item = (&Module, &Import)> {
        self.modules
            .iter()
            .flat_map(|m| m.imports.iter().map(move |i| (m, i)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Module {
    pub kind: ModuleKind,
    pub name: String,
    pub pos: Pos,
    pub parameters: Vec<Parameter>,
    /// Names declared inside the `exports` block.
    pub exports: Vec<String>,
    pub imports: Vec<Import>,
    pub sorts: Vec<(String, Pos)>,
    pub functions: Vec<(FuncDecl, Pos)>,
    pub variables: Vec<(String, String, Pos)>,
    pub equations: Vec<EquationAst>,
    pub atoms: Vec<Signature>,
    pub processes: Vec<Signature>,
    pub sets: Vec<SetDecl>,
    pub comms: Vec<(CommEntry, Pos)>,
    pub disrupts: Vec<(String, Pos)>,
    pub definitions: Vec<Definition>,
}

impl Module {
    pub fn new(kind: ModuleKind, name: impl Into<String>) -> Self {
        Module {
            kind,
            name: name.into(),
            pos: Pos::default(),
            parameters: Vec::new(),
            exports: Vec::new(),
            imports: Vec::new(),
            sorts: Vec::new(),
            functions: Vec::new(),
            variables: Vec::new(),
            equations: Vec::new(),
            atoms: Vec::new(),
            processes: Vec::new(),
            sets: Vec::new(),
            comms: Vec::new(),
            disrupts: Vec::new(),
            definitions: Vec::new(),
        }
    }

    pub fn definition(&self, name: &str) -> Option<&Definition> {
        self.definitions.iter().find(|d| d.name == name)
    }
}

/// `parameters Name begin processes P end Name`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parameter {
    pub name: String,
    pub pos: Pos,
    pub processes: Vec<Signature>,
    pub atoms: Vec<Signature>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    pub module: String,
    pub pos: Pos,
    pub bindings: Vec<Binding>,
    pub renamings: Vec<(String, String)>,
}

impl Import {
    pub fn plain(module: impl Into<String>) -> Self {
        Import {
            module: module.into(),
            pos: Pos::default(),
            bindings: Vec::new(),
            renamings: Vec::new(),
        }
    }
}

/// `Param bound by [formal -> actual, ...] to Module`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub param: String,
    pub map: Vec<(String, String)>,
    pub actual: String,
    pub pos: Pos,
}

/// A name with argument sorts (atoms and processes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub sorts: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationAst {
    pub label: Option<String>,
    pub lhs: Term,
    pub rhs: Term,
    pub pos: Pos,
}

/// A named set of atoms. A bare item naming another set stands for that
/// set's members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetDecl {
    pub name: String,
    pub items: Vec<ActPattern>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub params: Vec<String>,
    pub body: ProcessExpr,
    pub pos: Pos,
}
