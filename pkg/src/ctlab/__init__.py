"""ctlab: causal team semantics workbench.

Model checking for interventionist counterfactuals and dependence atoms
over causal and generalized causal teams, the do-operator, characteristic
formulas, exact entailment decision through disjunctive normal forms,
definability synthesis, and natural-deduction proof checking.
"""

__version__ = "0.1.0"
