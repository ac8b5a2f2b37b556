use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::kernel::{DataValue, Identity, PrivacyType, PrivateData, Sym};

/// Resolved type: private `t<g>`, purpose `p<g>` or channel `G[T...]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Private { t: Sym, g: Sym },
    Purpose { p: Sym, g: Sym },
    Chan { group: Sym, payload: Vec<Type> },
}

impl Type {
    pub fn private(t: &str, g: &str) -> Self {
        Type::Private {
            t: t.into(),
            g: g.into(),
        }
    }

    pub fn purpose(p: &str, g: &str) -> Self {
        Type::Purpose {
            p: p.into(),
            g: g.into(),
        }
    }

    pub fn chan(group: &str, payload: Vec<Type>) -> Self {
        Type::Chan {
            group: group.into(),
            payload,
        }
    }

    /// `G[t<g>]`: the type of a reference to a `t` store.
    pub fn reference_of(&self) -> Option<(&Sym, &Sym, &Sym)> {
        match self {
            Type::Chan { group, payload } => match payload.as_slice() {
                [Type::Private { t, g }] => Some((group, t, g)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn to_surface(&self) -> PrivacyType {
        match self {
            Type::Private { t: n, g } | Type::Purpose { p: n, g } => PrivacyType::Base {
                name: n.clone(),
                ground: g.clone(),
            },
            Type::Chan { group, payload } => PrivacyType::Chan {
                group: group.clone(),
                payload: payload.iter().map(Type::to_surface).collect(),
            },
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_surface())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GammaKey {
    /// Channel, reference or purpose constant.
    Name(Sym),
    /// Private literal `{id # c}`, `{_ # c}`, or a pattern entry `{x # y}`
    /// (stored with the pattern variables as plain identifiers).
    Data(PrivateData),
}

impl fmt::Display for GammaKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaKey::Name(n) => write!(f, "{n}"),
            GammaKey::Data(pd) => write!(f, "{pd}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GammaError {
    #[error("duplicate entry for {0}")]
    Duplicate(String),
    #[error("{key}: a private-data key needs a private type, found {ty}")]
    KindMismatch { key: String, ty: String },
}

/// Γ. Entries keep their surface types; whether `X<g>` is private or a
/// purpose is decided by the declared private types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Gamma {
    entries: BTreeMap<GammaKey, PrivacyType>,
    private: BTreeSet<Sym>,
}

impl Gamma {
    pub fn new() -> Self {
        Gamma::default()
    }

    pub fn declare_private(&mut self, t: &Sym) {
        self.private.insert(t.clone());
    }

    pub fn private_types(&self) -> &BTreeSet<Sym> {
        &self.private
    }

    pub fn is_private(&self, t: &Sym) -> bool {
        self.private.contains(t)
    }

    pub fn insert(&mut self, key: GammaKey, ty: PrivacyType) -> Result<(), GammaError> {
        if self.entries.contains_key(&key) {
            return Err(GammaError::Duplicate(key.to_string()));
        }
        if let GammaKey::Data(_) = &key {
            match &ty {
                PrivacyType::Base { name, .. } => {
                    self.private.insert(name.clone());
                }
                PrivacyType::Chan { .. } => {
                    return Err(GammaError::KindMismatch {
                        key: key.to_string(),
                        ty: ty.to_string(),
                    })
                }
            }
        }
        self.entries.insert(key, ty);
        Ok(())
    }

    /// Insert or overwrite (used when extending Γ with received values).
    pub fn set(&mut self, key: GammaKey, ty: &Type) {
        if let Type::Private { t, .. } = ty {
            self.private.insert(t.clone());
        }
        self.entries.insert(key, ty.to_surface());
    }

    pub fn remove(&mut self, key: &GammaKey) -> Option<PrivacyType> {
        self.entries.remove(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GammaKey, &PrivacyType)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn resolve(&self, ty: &PrivacyType) -> Type {
        match ty {
            PrivacyType::Base { name, ground } if self.private.contains(name) => Type::Private {
                t: name.clone(),
                g: ground.clone(),
            },
            PrivacyType::Base { name, ground } => Type::Purpose {
                p: name.clone(),
                g: ground.clone(),
            },
            PrivacyType::Chan { group, payload } => Type::Chan {
                group: group.clone(),
                payload: payload.iter().map(|t| self.resolve(t)).collect(),
            },
        }
    }

    pub fn name(&self, n: &Sym) -> Option<Type> {
        self.entries
            .get(&GammaKey::Name(n.clone()))
            .map(|t| match t {
                // a plain key with a base type is a purpose constant
                PrivacyType::Base { name, ground } => Type::Purpose {
                    p: name.clone(),
                    g: ground.clone(),
                },
                chan => self.resolve(chan),
            })
    }

    pub fn data(&self, pd: &PrivateData) -> Option<Type> {
        self.entries
            .get(&GammaKey::Data(pd.clone()))
            .map(|t| self.resolve(t))
    }

    /// The Γ entry for a pattern `{x # y}` or `{_ # y}`, if declared.
    pub fn pattern(&self, identity: Option<&Sym>, data: &Sym) -> Option<Type> {
        let identity = match identity {
            Some(x) => Identity::Known(x.clone()),
            None => Identity::Hidden,
        };
        self.data(&PrivateData {
            identity,
            data: DataValue::Const(data.clone()),
        })
    }

    /// Declares additional private types (e.g. those bound by a policy).
    pub fn merge_private(&mut self, types: impl IntoIterator<Item = Sym>) {
        self.private.extend(types);
    }
}
