// Copyright 2026 The InstaCluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "instacluster/bootstrap.hpp"

namespace insta {

// Operator-side cluster operations after the first provisioning. Each public
// call holds the cluster's lease; an overlapping call fails with BusyCluster.

// Stops every instance of the cluster, slaves first. Idempotent on a stopped
// cluster.
void stop_cluster(Environment& env, const std::string& region, const Credentials& creds);

// Starts stopped slaves, then the master. The master's boot reconciles the
// cluster; its report is returned. On a running, ready cluster this only
// reconciles.
ReconcileReport start_cluster(Environment& env, const std::string& region, const Credentials& creds);

// Runs on the master after a full restart: rediscovers the instances, restores
// hostname bindings from Name tags, rotates the cluster key to the next
// generation and redistributes hosts files with the current addresses.
ReconcileReport reconcile_on_restart(Environment& env, const std::string& master_id,
                                     const MasterConfig& config);

// Stop the cluster if needed, launch `additional` slaves, start the old slaves
// and then the master, which folds the newcomers in.
ClusterState extend_cluster(Environment& env, const std::string& region, const Credentials& creds,
                            int additional, const std::string& instance_type);

}  // namespace insta
