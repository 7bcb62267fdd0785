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

/*
 * C interface to the InstaCluster library.
 *
 * A world (ic_world) is one deterministic simulation: an in-memory IaaS
 * region set, the simulated hosts and the provisioning scripts running on
 * them. Every function returns an ic_status; IC_OK is zero. On failure the
 * world's ic_last_error() holds a readable message.
 *
 * Strings returned through `char**` out-parameters are heap-allocated and
 * must be released with ic_free().
 */
#ifndef INSTACLUSTER_H_
#define INSTACLUSTER_H_

#include <stdint.h>

#if defined(_WIN32)
#define IC_API __declspec(dllexport)
#else
#define IC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ic_world ic_world;

/* Values match insta::ErrorCode. */
typedef enum ic_status {
  IC_OK = 0,
  IC_ERR_INACTIVE_CREDENTIALS = 1,
  IC_ERR_INVALID_REGION = 2,
  IC_ERR_UNKNOWN_INSTANCE = 3,
  IC_ERR_INVALID_TRANSITION = 4,
  IC_ERR_UNKNOWN_KEY = 5,
  IC_ERR_AUTH_FAILED = 6,
  IC_ERR_HOST_UNREACHABLE = 7,
  IC_ERR_USER_EXISTS = 8,
  IC_ERR_UNKNOWN_USER = 9,
  IC_ERR_NOT_INSTALLED = 10,
  IC_ERR_MALFORMED_USER_DATA = 11,
  IC_ERR_DUPLICATE_TAG_HOSTNAME = 12,
  IC_ERR_MISSING_IP = 13,
  IC_ERR_CLUSTER_ALREADY_EXISTS = 14,
  IC_ERR_DISCOVERY_TIMEOUT = 15,
  IC_ERR_SLAVE_UNREACHABLE = 16,
  IC_ERR_BUSY_CLUSTER = 17,
  IC_ERR_CLUSTER_NOT_READY = 18,
  IC_ERR_UNKNOWN_SERVICE = 19,
  IC_ERR_STALE_AGENT = 20,
  IC_ERR_PORT_CONFLICT = 21,
  IC_ERR_SERVER_UNREACHABLE = 22,
  IC_ERR_NO_CLUSTER = 23,
  IC_ERR_INVALID_SPEC = 24,
  IC_ERR_INVALID_SESSION = 25,
  IC_ERR_INVALID_ARGUMENT = 26,
  IC_ERR_INVALID_MESSAGE = 27,
  IC_ERR_UNKNOWN_HOST = 28,
  IC_ERR_INTERNAL = 29
} ic_status;

typedef struct ic_world_options {
  uint64_t seed;
  const char* access_key_id; /* NULL: simulator default */
  const char* secret_key;    /* NULL: simulator default */
  int stable_ips;            /* nonzero: keep private IPs across restarts */
  int64_t max_boot_delay;    /* seconds; 0 boots synchronously */
} ic_world_options;

IC_API const char* ic_version(void);
/* "ClusterAlreadyExists" etc.; "Unknown" for out-of-range values. */
IC_API const char* ic_status_name(int status);

IC_API int ic_world_create(const ic_world_options* options, ic_world** out);
IC_API void ic_world_destroy(ic_world* world);
/* Message of the last failed call on this world; "" after a success. */
IC_API const char* ic_last_error(const ic_world* world);

/* Credentials presented by later operator calls. Unregistered keys fail
 * with IC_ERR_INACTIVE_CREDENTIALS. */
IC_API int ic_set_credentials(ic_world* world, const char* access_key_id, const char* secret_key);

/* `spec_json` is a .cluster.json document. */
IC_API int ic_provision(ic_world* world, const char* spec_json);
IC_API int ic_stop(ic_world* world, const char* region);
/* `report_json` (optional) receives the reconcile report. */
IC_API int ic_start(ic_world* world, const char* region, char** report_json);
/* `instance_type` may be NULL to reuse the slaves' type. */
IC_API int ic_extend(ic_world* world, const char* region, int count, const char* instance_type);
/* Comma-separated service names. */
IC_API int ic_install(ic_world* world, const char* region, const char* services_csv);
IC_API int ic_advance_clock(ic_world* world, int64_t seconds);

IC_API int ic_status_report(ic_world* world, const char* region, char** text);
IC_API int ic_export_spec(ic_world* world, const char* region, char** spec_json);
/* IC_OK for a valid document; IC_ERR_INVALID_SPEC with a JSON array of
 * {"path","message"} issues otherwise. `issues_json` may be NULL. */
IC_API int ic_validate_spec(const char* spec_json, char** issues_json);

IC_API int ic_trace(ic_world* world, char** text);
IC_API int ic_snapshot(ic_world* world, char** json);

IC_API void ic_free(void* ptr);

#ifdef __cplusplus
}
#endif

#endif /* INSTACLUSTER_H_ */
