use super::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned<T> {
    pub node: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(node: T, span: Span) -> Self {
        Spanned { node, span }
    }
}

pub type Name = Spanned<String>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryDecl {
    pub name: Name,
    pub objects: Vec<Name>,
    /// `arrow f: a -> b`.
    pub arrows: Vec<Spanned<(Name, Name, Name)>>,
    /// `compose f . g = h`, read `f ∘ g = h`.
    pub compositions: Vec<Spanned<(Name, Name, Name)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologyEntry {
    Trivial,
    Maximal,
    Canonical,
    Giraud { functor: Name, over: Name },
    /// A covering sieve, taken verbatim.
    Cover { object: Name, arrows: Vec<Name> },
    /// A family whose sieve is closed into a topology.
    Generate { object: Name, arrows: Vec<Name> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyDecl {
    pub name: Name,
    pub on: Name,
    pub entries: Vec<Spanned<TopologyEntry>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorDecl {
    pub name: Name,
    pub source: Name,
    pub target: Name,
    pub objects: Vec<Spanned<(Name, Name)>>,
    pub arrows: Vec<Spanned<(Name, Name)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedDecl {
    pub name: Name,
    pub base: Name,
    pub fibers: Vec<Spanned<(Name, Name)>>,
    pub transports: Vec<Spanned<(Name, Name)>>,
    /// Registers the total category of the Grothendieck construction.
    pub total: Option<Name>,
    /// Registers its projection functor.
    pub projection: Option<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafDecl {
    pub name: Name,
    pub on: Name,
    pub elements: Vec<Spanned<(Name, Vec<Name>)>>,
    /// `act f: x -> y`: the action of `f: c → c'` sends `x ∈ P(c')` to `y ∈ P(c)`.
    pub actions: Vec<Spanned<(Name, Name, Name)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformDecl {
    pub name: Name,
    pub source: Name,
    pub target: Name,
    pub components: Vec<Spanned<(Name, Name)>>,
}

/// `site S: p from K to J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteDecl {
    pub name: Name,
    pub functor: Name,
    pub source: Name,
    pub target: Name,
}

/// `check KIND target args...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckDecl {
    pub kind: Name,
    pub target: Name,
    pub args: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Category(CategoryDecl),
    Topology(TopologyDecl),
    Functor(FunctorDecl),
    Indexed(IndexedDecl),
    Presheaf(PresheafDecl),
    Transform(TransformDecl),
    Site(SiteDecl),
    Check(CheckDecl),
}

impl Decl {
    pub fn keyword(&self) -> &'static str {
        match self {
            Decl::Category(_) => "category",
            Decl::Topology(_) => "topology",
            Decl::Functor(_) => "functor",
            Decl::Indexed(_) => "indexed",
            Decl::Presheaf(_) => "presheaf",
            Decl::Transform(_) => "transform",
            Decl::Site(_) => "site",
            Decl::Check(_) => "check",
        }
    }

    pub fn name(&self) -> &Name {
        match self {
            Decl::Category(d) => &d.name,
            Decl::Topology(d) => &d.name,
            Decl::Functor(d) => &d.name,
            Decl::Indexed(d) => &d.name,
            Decl::Presheaf(d) => &d.name,
            Decl::Transform(d) => &d.name,
            Decl::Site(d) => &d.name,
            Decl::Check(d) => &d.kind,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub decl: Decl,
    pub span: Span,
}
