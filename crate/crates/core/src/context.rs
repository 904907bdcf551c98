// SPDX-License-Identifier: Apache-2.0

use crate::equiv::{EquivError, GateConjTable, OrderConvention, SymmetryGroup};
use crate::gate::{Architecture, GateLibrary};
use crate::perm::Width;

/// Everything fixed by a choice of width, architecture and order: the gate
/// library, its symmetry group and the gate conjugation table.
#[derive(Debug, Clone)]
pub struct Context {
    library: GateLibrary,
    group: SymmetryGroup,
    conj: GateConjTable,
}

impl Context {
    pub fn new(width: Width, arch: Architecture) -> Self {
        Self::with_order(width, arch, OrderConvention::default()).expect("libraries are closed under their groups")
    }

    pub fn with_order(width: Width, arch: Architecture, order: OrderConvention) -> Result<Self, EquivError> {
        let library = GateLibrary::new(width, arch);
        let group = SymmetryGroup::new(width, arch, order);
        let conj = GateConjTable::new(&group, &library)?;
        Ok(Context { library, group, conj })
    }

    pub fn width(&self) -> Width {
        self.library.width()
    }

    pub fn arch(&self) -> Architecture {
        self.library.arch()
    }

    pub fn order(&self) -> OrderConvention {
        self.group.order()
    }

    pub fn library(&self) -> &GateLibrary {
        &self.library
    }

    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    pub fn conj(&self) -> &GateConjTable {
        &self.conj
    }
}
