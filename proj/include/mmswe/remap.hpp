// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "mmswe/dg.hpp"
#include "mmswe/mesh.hpp"
#include "mmswe/swe.hpp"

namespace mmswe {

struct RemapStats {
  int steps = 0;               // transport steps taken; 0 when the meshes coincide
  double max_volume_err = 0;   // max relative gap: transported vs geometric element volume
  int pp_modified = 0;         // elements touched by the positivity limiter
  double min_theta = 1.0;      // smallest positivity scaling factor applied
};

// Transfers DG fields between two meshes that share a connectivity object, by
// integrating each field along the straight-line deformation path between the vertex
// positions. Conservative (each field's integral is preserved), constant-preserving
// (element volumes are transported by the same update as the moments), and, for fields
// flagged in `pp`, nonnegativity-preserving via the linear scaling limiter after every
// stage. Fields must live on `from`; on return their coefficients represent the field
// on `to` (mesh handles are not re-pointed here).
RemapStats remap_fields(const std::vector<DGField*>& fields, const std::vector<uint8_t>& pp,
                        const SimplicialMesh& from, const SimplicialMesh& to,
                        double pos_floor = 0.0);

// Full flow-state transfer onto `to`: depth (positivity-limited), momenta, and the
// water surface h + b are transported; the new bottom is the transported surface minus
// the transported depth. A flat surface therefore stays exactly flat, and positivity
// clipping of the depth is absorbed as a bottom adjustment. All field mesh handles are
// re-pointed to `to`.
RemapStats remap_flow(SweFields& f, MeshPtr to, double pos_floor = 0.0);

}  // namespace mmswe
