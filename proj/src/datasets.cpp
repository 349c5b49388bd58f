#include <stdexcept>

#include "plgw/lawfit.hpp"

namespace plgw {

namespace {

// Embedded fracture-network flow fixtures (Spic quarry granite exposures):
// prescribed inlet velocity versus average total-energy loss per length,
// from stationary incompressible flow simulations on the 2-d and 3-d
// fracture geometries. A_inlet and phi_eff come from the same geometric
// models; the 2-d A_inlet is area per unit thickness, stored as given.

FlowDataset make_spic_2d() {
  FlowDataset ds;
  ds.label = "spic-2d";
  ds.source_id = "spic-quarry-2d-simulations";
  ds.A_inlet = 9.9987e-3;  // area per unit thickness; stored as given
  ds.phi_eff = 0.0347;
  ds.rows = {
      {0.0001, 0.11832}, {0.0003, 0.35250},  {0.0005, 0.59079},  {0.0007, 0.83353},
      {0.0009, 1.07690}, {0.001, 1.19945},   {0.003, 3.79922},   {0.005, 6.82157},
      {0.007, 9.95944},  {0.009, 13.71417},  {0.01, 15.44159},   {0.03, 69.37591},
      {0.05, 154.31617}, {0.07, 270.63357},  {0.09, 408.52049},  {0.1, 493.65869},
      {0.2, 1971.17391}, {0.3, 4057.61605},  {0.4, 6960.98874},  {0.5, 10507.2326},
  };
  return ds;
}

FlowDataset make_spic_3d() {
  FlowDataset ds;
  ds.label = "spic-3d";
  ds.source_id = "spic-quarry-3d-simulations";
  ds.A_inlet = 0.006;
  ds.phi_eff = 0.04728;
  ds.rows = {
      {0.0001, 0.03358},  {0.0003, 0.10272},  {0.0005, 0.17364},  {0.0007, 0.2462},
      {0.0009, 0.3228},   {0.001, 0.36216},   {0.003, 1.20726},   {0.005, 2.21733},
      {0.007, 3.3564},    {0.009, 4.60464},   {0.01, 5.26071},    {0.03, 23.40721},
      {0.05, 50.52472},   {0.07, 85.79307},   {0.09, 129.60561},  {0.1, 154.31271},
      {0.2, 496.05733},   {0.3, 1028.10647},  {0.4, 1742.67221},  {0.5, 2676.70004},
      {0.6, 3761.46226},  {0.7, 5041.91289},  {0.8, 6480.71039},  {0.9, 8138.64571},
      {1.0, 9895.35284},
  };
  return ds;
}

}  // namespace

const FlowDataset& embedded_dataset(const std::string& id) {
  static const FlowDataset spic2d = make_spic_2d();
  static const FlowDataset spic3d = make_spic_3d();
  if (id == "spic-2d") return spic2d;
  if (id == "spic-3d") return spic3d;
  throw std::invalid_argument("embedded_dataset: unknown id: " + id);
}

std::vector<std::string> embedded_dataset_ids() { return {"spic-2d", "spic-3d"}; }

}  // namespace plgw
