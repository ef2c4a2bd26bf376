//! The interface a finite graded GF(2)-algebra exposes to the tensor-power
//! machinery.

use crate::bits::BitVector;

/// A connected, finite-dimensional graded commutative algebra over GF(2),
/// generated in degree one, with a unique top class.
///
/// Elements are [`BitVector`]s over the additive basis.
pub trait GradedAlgebra: Send + Sync {
    /// Canonical name of the underlying space, e.g. `F(1^2,3)` or `N(2)`.
    fn label(&self) -> String;

    fn basis_len(&self) -> usize;

    fn basis_degree(&self, index: usize) -> u32;

    /// Text form of a basis element in terms of the generators.
    fn basis_label(&self, index: usize) -> String;

    /// Exponents of a basis element with respect to the generators.
    fn basis_exponents(&self, index: usize) -> Vec<u32>;

    /// Index of a basis element given its generator exponents, if it is one.
    fn basis_index(&self, exps: &[u32]) -> Option<usize>;

    fn unit_index(&self) -> usize;

    fn top_index(&self) -> usize;

    /// Top degree (dimension of the manifold).
    fn dim(&self) -> u32 {
        self.basis_degree(self.top_index())
    }

    /// Number of degree-one generators.
    fn generator_count(&self) -> usize;

    /// Prefix used when printing generators (`x` or `a`).
    fn generator_symbol(&self) -> &'static str;

    /// Largest `n` with `g_j^n != 0`.
    fn generator_height(&self, j: usize) -> u32;

    /// Generator exponents whose product is the top class.
    fn top_exponents(&self) -> Vec<u32>;

    /// The product `g_1^{e_1} ... g_k^{e_k}` expressed in the basis.
    fn generator_monomial(&self, exps: &[u32]) -> BitVector;

    /// XORs `g_1^{e_1} ... g_k^{e_k}` into `out`.
    fn xor_generator_monomial_into(&self, exps: &[u32], out: &mut BitVector) {
        out.xor_assign(&self.generator_monomial(exps));
    }

    /// XORs the product of two basis elements into `out`.
    fn mul_basis_into(&self, a: usize, b: usize, out: &mut BitVector);

    /// Coefficient of the top class in `g_1^{e_1} ... g_k^{e_k}`.
    fn top_coefficient_of_monomial(&self, exps: &[u32]) -> bool {
        self.generator_monomial(exps).get(self.top_index())
    }

    fn zero(&self) -> BitVector {
        BitVector::zeros(self.basis_len())
    }

    fn one(&self) -> BitVector {
        BitVector::unit(self.basis_len(), self.unit_index())
    }

    fn mul(&self, a: &BitVector, b: &BitVector) -> BitVector {
        let mut out = self.zero();
        for i in a.ones() {
            for j in b.ones() {
                self.mul_basis_into(i, j, &mut out);
            }
        }
        out
    }

    /// Coefficient of the top class in `a * b`.
    fn top_pairing(&self, a: &BitVector, b: &BitVector) -> bool {
        self.mul(a, b).get(self.top_index())
    }
}
