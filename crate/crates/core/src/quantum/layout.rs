use serde::Serialize;

use crate::error::{Error, Result};

/// Hard cap on the total number of simulated qubits.
pub const DEFAULT_QUBIT_CAP: usize = 22;

/// Qubit layout of a simulated register.
///
/// A basis index is laid out, from the least significant bit upwards, as the
/// system register (`n` bits), the scratchpad (`h` bits) and then `blocks`
/// ancilla blocks of `block_bits` bits each, in the order they are applied:
///
/// ```text
/// index = system | scratch << n | block_0 << (n + h) | block_1 << (n + h + k) | ...
/// ```
///
/// Within a block, bit `t` of the block label is the `t`-th ancilla qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    system: usize,
    scratchpad: usize,
    blocks: usize,
    block_bits: usize,
}

impl RegisterLayout {
    pub fn new(system: usize, scratchpad: usize, blocks: usize, block_bits: usize) -> Result<Self> {
        Self::with_cap(system, scratchpad, blocks, block_bits, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(
        system: usize,
        scratchpad: usize,
        blocks: usize,
        block_bits: usize,
        cap: usize,
    ) -> Result<Self> {
        if (blocks == 0) != (block_bits == 0) {
            return Err(Error::validation(format!(
                "ancilla register needs both a block count and a block width, got {blocks} blocks of {block_bits} bits"
            )));
        }
        let total = blocks
            .checked_mul(block_bits)
            .and_then(|a| a.checked_add(system))
            .and_then(|a| a.checked_add(scratchpad))
            .ok_or_else(|| Error::validation("qubit count overflow"))?;
        if total > cap.min(usize::BITS as usize - 2) {
            return Err(Error::capacity(
                format!("register (n={system}, h={scratchpad}, eta={blocks}, k={block_bits})"),
                total,
                cap,
            ));
        }
        Ok(RegisterLayout {
            system,
            scratchpad,
            blocks,
            block_bits,
        })
    }

    pub fn system_only(system: usize) -> Result<Self> {
        Self::new(system, 0, 0, 0)
    }

    /// The system and scratchpad registers with no ancillas.
    pub fn register_only(&self) -> Self {
        RegisterLayout {
            blocks: 0,
            block_bits: 0,
            ..*self
        }
    }

    pub fn system_qubits(&self) -> usize {
        self.system
    }

    pub fn scratchpad_qubits(&self) -> usize {
        self.scratchpad
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn block_bits(&self) -> usize {
        self.block_bits
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.blocks * self.block_bits
    }

    /// System plus scratchpad qubits.
    pub fn register_qubits(&self) -> usize {
        self.system + self.scratchpad
    }

    pub fn total_qubits(&self) -> usize {
        self.register_qubits() + self.ancilla_qubits()
    }

    /// `N = 2^n`.
    pub fn system_dim(&self) -> usize {
        1 << self.system
    }

    pub fn register_dim(&self) -> usize {
        1 << self.register_qubits()
    }

    pub fn ancilla_dim(&self) -> usize {
        1 << self.ancilla_qubits()
    }

    pub fn dim(&self) -> usize {
        1 << self.total_qubits()
    }

    pub fn index(&self, register: usize, ancilla: usize) -> usize {
        register | (ancilla << self.register_qubits())
    }

    /// Label of ancilla block `block` inside a full ancilla label.
    pub fn block_label(&self, ancilla: usize, block: usize) -> usize {
        (ancilla >> (block * self.block_bits)) & ((1 << self.block_bits) - 1)
    }
}
